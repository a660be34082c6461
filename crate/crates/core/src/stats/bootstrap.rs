//! Day-level bootstrap of the average 24-hour profile, and the two tests
//! built on it.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::par::map_iterations;
use crate::rng::{domain, Stream};
use crate::HOURS_PER_DAY;

use super::days::{DaySeriesSet, DayVector};
use super::hours::HourSet;
use super::report::{TestKind, TestReport};

pub const DEFAULT_BOOTSTRAPS: u64 = 10_000;
pub const MIN_BOOTSTRAPS: u64 = 1000;

/// Redraws go to index `b | attempt << 40`, keeping slot `b`'s first draw
/// at plain index `b`.
const ATTEMPT_SHIFT: u32 = 40;

/// Draw `n_days` day indices uniformly with replacement.
pub fn bootstrap_indices(n_days: usize, seed: u64, iteration: u64) -> Vec<usize> {
    draw_indices(n_days, Stream::new(seed, domain::BOOTSTRAP, iteration))
}

fn draw_indices(n_days: usize, mut stream: Stream) -> Vec<usize> {
    (0..n_days)
        .map(|_| stream.below(n_days as u64) as usize)
        .collect()
}

/// Per-hour mean over the chosen days, skipping gaps. An hour missing from
/// every chosen day stays missing.
fn average_days(days: &[DayVector], indices: &[usize]) -> DayVector {
    let mut sums = [0.0; HOURS_PER_DAY];
    let mut counts = [0usize; HOURS_PER_DAY];
    for &i in indices {
        for (h, v) in days[i].iter().enumerate() {
            if let Some(v) = v {
                sums[h] += v;
                counts[h] += 1;
            }
        }
    }
    core::array::from_fn(|h| (counts[h] > 0).then(|| sums[h] / counts[h] as f64))
}

/// The average day of one bootstrap resample.
pub fn bootstrap_mean_series(d: &DaySeriesSet, seed: u64, iteration: u64) -> Result<DayVector> {
    if d.days.is_empty() {
        return Err(Error::TooFewObservations { needed: 1, found: 0 });
    }
    Ok(average_days(
        &d.days,
        &bootstrap_indices(d.len(), seed, iteration),
    ))
}

/// Run `b` bootstrap slots; each keeps redrawing until `score` is defined.
/// Fails if more than a tenth of the requested draws had to be discarded.
fn run_bootstrap<T, F>(d: &DaySeriesSet, b: u64, seed: u64, test_domain: u64, score: F) -> Result<(Vec<T>, u64)>
where
    T: Send,
    F: Fn(&DayVector) -> Option<T> + Sync + Send,
{
    if b < MIN_BOOTSTRAPS {
        return Err(Error::InvalidParameter(alloc::format!(
            "need at least {MIN_BOOTSTRAPS} bootstraps, got {b}"
        )));
    }
    if d.days.is_empty() {
        return Err(Error::TooFewObservations { needed: 1, found: 0 });
    }
    let max_discards = b / 10;
    let slots = map_iterations(b, |slot| {
        let mut discarded = 0u64;
        loop {
            let index = slot | (discarded << ATTEMPT_SHIFT);
            let stream = Stream::new(seed, test_domain, index);
            let avg = average_days(&d.days, &draw_indices(d.len(), stream));
            if let Some(value) = score(&avg) {
                return (Some(value), discarded);
            }
            discarded += 1;
            if discarded > max_discards {
                return (None, discarded);
            }
        }
    });
    let discarded: u64 = slots.iter().map(|(_, n)| n).sum();
    if discarded > max_discards {
        return Err(Error::TooManyDiscards {
            discarded,
            requested: b,
        });
    }
    let values = slots.into_iter().map(|(v, _)| v.expect("defined")).collect();
    Ok((values, discarded))
}

/// Mean of the average day over `hours`, skipping gaps.
fn hour_set_score(avg: &DayVector, hours: &HourSet) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for h in hours.hours() {
        if let Some(v) = avg[h] {
            sum += v;
            n += 1;
        }
    }
    (n > 0).then(|| sum / n as f64)
}

/// Bootstrap test that scores over `ha` exceed those over `hb`:
/// `p = #{score(hb) >= score(ha)} / B`. The statistic is the mean over
/// bootstraps of `score(ha) - score(hb)`.
pub fn tmd_test(d: &DaySeriesSet, ha: &HourSet, hb: &HourSet, bootstraps: u64, seed: u64) -> Result<TestReport> {
    let (pairs, discarded) = run_bootstrap(d, bootstraps, seed, domain::TMD, |avg| {
        Some((hour_set_score(avg, ha)?, hour_set_score(avg, hb)?))
    })?;
    let exceedances = pairs.iter().filter(|(a, b)| b >= a).count() as u64;
    let trace: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
    let statistic = trace.iter().sum::<f64>() / trace.len() as f64;
    Ok(TestReport {
        test: TestKind::Tmd,
        mood: d.mood.clone(),
        scope: d.scope.clone(),
        statistic: Some(statistic),
        exceedances,
        iterations: bootstraps,
        seed,
        parameters: vec![
            ("bootstraps".to_string(), bootstraps.to_string()),
            ("ha".to_string(), ha.to_list()),
            ("hb".to_string(), hb.to_list()),
            ("days".to_string(), d.len().to_string()),
            ("discarded".to_string(), discarded.to_string()),
        ],
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
}

impl Extremum {
    pub fn as_str(&self) -> &'static str {
        match self {
            Extremum::Max => "max",
            Extremum::Min => "min",
        }
    }
}

/// Whether any hour attaining the extremum lies in `hc`, and the first such
/// hour. `None` when every hour is missing.
fn extremum_in(avg: &DayVector, hc: &HourSet, mode: Extremum) -> Option<(bool, usize)> {
    let better = |a: f64, b: f64| match mode {
        Extremum::Max => a > b,
        Extremum::Min => a < b,
    };
    let mut best: Option<(usize, f64)> = None;
    for (h, v) in avg.iter().enumerate() {
        if let Some(v) = *v {
            if best.is_none_or(|(_, b)| better(v, b)) {
                best = Some((h, v));
            }
        }
    }
    let (first, value) = best?;
    let reached = avg
        .iter()
        .enumerate()
        .any(|(h, v)| *v == Some(value) && hc.contains(h));
    Some((reached, first))
}

/// Bootstrap test that the average day peaks (or bottoms out) inside `hc`:
/// `p = #{extremum not in hc} / B`. Tied extremum hours all count.
pub fn tpt_test(d: &DaySeriesSet, hc: &HourSet, mode: Extremum, bootstraps: u64, seed: u64) -> Result<TestReport> {
    let (outcomes, discarded) = run_bootstrap(d, bootstraps, seed, domain::TPT, |avg| {
        extremum_in(avg, hc, mode)
    })?;
    let exceedances = outcomes.iter().filter(|(reached, _)| !reached).count() as u64;
    let trace = outcomes.iter().map(|&(_, h)| h as f64).collect();
    Ok(TestReport {
        test: TestKind::Tpt,
        mood: d.mood.clone(),
        scope: d.scope.clone(),
        statistic: None,
        exceedances,
        iterations: bootstraps,
        seed,
        parameters: vec![
            ("bootstraps".to_string(), bootstraps.to_string()),
            ("hc".to_string(), hc.to_list()),
            ("mode".to_string(), mode.as_str().to_string()),
            ("days".to_string(), d.len().to_string()),
            ("discarded".to_string(), discarded.to_string()),
        ],
        trace,
    })
}
