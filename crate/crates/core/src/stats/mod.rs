//! Circadian statistics over per-day hourly mood scores.
//!
//! * [`tcp_test`]: permutation test on the mean pairwise day-to-day
//!   correlation, shuffling hours within each day.
//! * [`tmd_test`]: bootstrap comparison of the mean score over two hour sets.
//! * [`tpt_test`]: bootstrap test that the daily peak (or trough) of the
//!   average day falls inside an hour set.
//! * [`autocorrelation`]: lagged Pearson correlation of the hourly series.
//!
//! All resampling draws come from [`crate::rng::Stream`]s keyed by
//! `(seed, test, iteration)`, so reports are bit-identical for any thread
//! count.

mod acf;
mod bootstrap;
pub mod correlation;
mod days;
mod hours;
mod report;
mod tcp;

pub use acf::{acf_confidence_bound, autocorrelation, AcfPoint};
pub use bootstrap::{
    bootstrap_indices, bootstrap_mean_series, tmd_test, tpt_test, Extremum,
    DEFAULT_BOOTSTRAPS, MIN_BOOTSTRAPS,
};
pub use correlation::{mean_pairwise_day_correlation, pearson, PairwiseCorrelation};
pub use days::{DayLabel, DaySeriesSet, DayVector};
pub use hours::HourSet;
pub use report::{TestKind, TestReport};
pub use tcp::{tcp_test, DEFAULT_PERMUTATIONS, MIN_PERMUTATIONS};
