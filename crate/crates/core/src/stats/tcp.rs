use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::par::map_iterations;
use crate::rng::{domain, Stream};
use crate::HOURS_PER_DAY;

use super::correlation::{brute_force_mean_pairwise, mean_pairwise_day_correlation, UnitDays};
use super::days::DaySeriesSet;
use super::report::{TestKind, TestReport};

pub const DEFAULT_PERMUTATIONS: u64 = 1000;
pub const MIN_PERMUTATIONS: u64 = 100;

/// Permutation test for a shared 24-hour pattern.
///
/// The statistic `c` is the mean pairwise correlation between days. Each
/// iteration shuffles the 24 values inside every day independently (gaps
/// move with the values) and recomputes it as `r_i`; `p = #{r_i >= c} / n`.
pub fn tcp_test(d: &DaySeriesSet, permutations: u64, seed: u64) -> Result<TestReport> {
    if permutations < MIN_PERMUTATIONS {
        return Err(Error::InvalidParameter(alloc::format!(
            "tcp needs at least {MIN_PERMUTATIONS} permutations, got {permutations}"
        )));
    }
    let observed = mean_pairwise_day_correlation(d)?;
    let complete = d.is_complete();

    let trace: Vec<f64> = if complete {
        let units = UnitDays::new(&d.days);
        map_iterations(permutations, |i| {
            let mut stream = Stream::new(seed, domain::TCP, i);
            units
                .mean_pairwise_permuted(|_, u| stream.shuffle(&mut u[..]))
                .map_or(f64::NAN, |c| c.mean)
        })
    } else {
        map_iterations(permutations, |i| {
            let mut stream = Stream::new(seed, domain::TCP, i);
            let mut days = d.days.clone();
            for day in days.iter_mut() {
                stream.shuffle(&mut day[..]);
            }
            brute_force_mean_pairwise(&days).map_or(f64::NAN, |c| c.mean)
        })
    };

    // An iteration with no usable pair at all counts against significance.
    let undefined = trace.iter().filter(|r| r.is_nan()).count();
    let exceedances = trace
        .iter()
        .filter(|&&r| r.is_nan() || r >= observed.mean)
        .count() as u64;

    let mut parameters = vec![
        ("permutations".to_string(), permutations.to_string()),
        ("days".to_string(), d.len().to_string()),
        ("hours".to_string(), HOURS_PER_DAY.to_string()),
        ("used_pairs".to_string(), observed.used_pairs.to_string()),
        ("skipped_pairs".to_string(), observed.skipped_pairs.to_string()),
        (
            "method".to_string(),
            if complete { "unit-vector" } else { "pairwise-deletion" }.to_string(),
        ),
    ];
    if undefined > 0 {
        parameters.push(("undefined_iterations".to_string(), undefined.to_string()));
    }

    Ok(TestReport {
        test: TestKind::Tcp,
        mood: d.mood.clone(),
        scope: d.scope.clone(),
        statistic: Some(observed.mean),
        exceedances,
        iterations: permutations,
        seed,
        parameters,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::correlation::pearson;
    use crate::stats::DayVector;

    fn day(f: impl Fn(usize) -> f64) -> DayVector {
        core::array::from_fn(|h| Some(f(h)))
    }

    fn wave(h: usize) -> f64 {
        libm::cos(2.0 * core::f64::consts::PI * (h as f64 - 9.0) / 24.0)
    }

    #[test]
    fn identical_days_are_never_beaten() {
        let d = DaySeriesSet::new("joy", "all", vec![day(wave); 84]).unwrap();
        let report = tcp_test(&d, 1000, 7).unwrap();
        assert!((report.statistic.unwrap() - 1.0).abs() < 1e-12);
        assert!(report.p_value() <= 0.005);
        assert_eq!(report.trace.len(), 1000);
    }

    #[test]
    fn p_value_is_a_ratio_of_counts() {
        let days: Vec<DayVector> = (0..10)
            .map(|k| day(|h| libm::sin((h * (k + 1)) as f64)))
            .collect();
        let d = DaySeriesSet::new("joy", "all", days).unwrap();
        let r = tcp_test(&d, 200, 3).unwrap();
        assert_eq!(r.p_value(), r.exceedances as f64 / 200.0);
        assert!(r.p_value() > 0.0);
    }

    #[test]
    fn both_paths_agree_on_the_same_permutation() {
        // with one hour missing from one day the pairwise path runs; build the
        // same permuted days by hand and compare with the brute-force oracle
        let mut days: Vec<DayVector> = (0..6)
            .map(|k| day(|h| wave(h) + 0.1 * libm::sin((h * 3 + k) as f64)))
            .collect();
        days[2][5] = None;
        let d = DaySeriesSet::new("joy", "all", days.clone()).unwrap();
        let report = tcp_test(&d, 100, 11).unwrap();
        let mut stream = Stream::new(11, domain::TCP, 4);
        for day in days.iter_mut() {
            stream.shuffle(&mut day[..]);
        }
        let mut sum = 0.0;
        let mut n = 0;
        for i in 0..days.len() {
            for j in (i + 1)..days.len() {
                sum += pearson(&days[i], &days[j]).unwrap();
                n += 1;
            }
        }
        assert!((report.trace[4] - sum / n as f64).abs() < 1e-12);
    }

    #[test]
    fn rejects_too_few_permutations() {
        let d = DaySeriesSet::new("joy", "all", vec![day(wave); 3]).unwrap();
        assert!(tcp_test(&d, 99, 0).is_err());
    }
}
