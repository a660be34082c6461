//! Affect-lexicon mood scoring for time-stamped short messages, and the
//! circadian statistics run on the resulting hourly series.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, configuration and
//! the command-line driver live in the `moodcycle` companion crate.
//!
//! Pipeline, bottom-up:
//!
//! * [`geo`] and [`window`] decide whether a message is kept and which
//!   `(season, day, hour)` bin it lands in.
//! * [`textproc`] tokenizes and Porter-stems the message text.
//! * [`lexicon`] turns per-mood word lists into stem sets and records
//!   confound exclusions.
//! * [`signal`] counts stems per bin and builds standardized mood scores,
//!   circadian profiles and their standard errors.
//! * [`stats`] holds the permutation (TCP), bootstrap (TMD, TPT) and
//!   autocorrelation analyses, all driven by the counter-based streams in
//!   [`rng`].
//! * [`synth`] generates corpora with a known injected rhythm.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod geo;
pub mod lexicon;
pub mod record;
pub mod rng;
pub mod signal;
pub mod stats;
pub mod synth;
pub mod textproc;
pub mod window;

mod numeric;
mod par;

pub use error::{Error, Result};
pub use record::TweetRecord;

/// Number of hourly bins in a day.
pub const HOURS_PER_DAY: usize = 24;
