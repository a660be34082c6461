//! Record files, configuration, on-disk tables and the `moodcycle`
//! command-line driver around `moodcycle-core`.

pub mod centres;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod records;
pub mod render;
pub mod store;
