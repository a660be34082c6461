//! Tokenization and stemming of message text.

mod porter;
mod tokenize;

pub use porter::porter_stem;
pub(crate) use porter::stem_str;
pub use tokenize::{tokenize, Token};
