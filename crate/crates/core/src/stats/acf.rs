use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numeric::sqrt;

use super::correlation::pearson_with_n;

/// Two-sided 95% band for a correlation estimated from `n_effective` pairs.
pub fn acf_confidence_bound(n_effective: usize) -> f64 {
    debug_assert!(n_effective >= 2);
    1.96 / sqrt(n_effective as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcfPoint {
    pub lag: usize,
    /// `None` when the correlation is undefined at this lag.
    pub r: Option<f64>,
    pub n_effective: usize,
    pub bound: Option<f64>,
}

/// Pearson correlation of the series with itself shifted by `1..=max_lag`,
/// dropping pairs where either side is missing.
pub fn autocorrelation(series: &[Option<f64>], max_lag: usize) -> Result<Vec<AcfPoint>> {
    if max_lag == 0 {
        return Err(Error::InvalidParameter("max_lag must be at least 1".into()));
    }
    if series.len() < max_lag + 3 {
        return Err(Error::TooFewObservations {
            needed: max_lag + 3,
            found: series.len(),
        });
    }
    let n = series.len();
    Ok((1..=max_lag)
        .map(|lag| {
            let (head, tail) = (&series[..n - lag], &series[lag..]);
            let n_effective = head
                .iter()
                .zip(tail)
                .filter(|(a, b)| a.is_some() && b.is_some())
                .count();
            let r = pearson_with_n(head, tail).ok().map(|(r, _)| r);
            AcfPoint {
                lag,
                r,
                n_effective,
                bound: (n_effective >= 2).then(|| acf_confidence_bound(n_effective)),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use alloc::vec;

    #[test]
    fn bound_values() {
        assert!((acf_confidence_bound(10_000) - 0.0196).abs() < 1e-15);
        assert!((acf_confidence_bound(4) - 0.98).abs() < 1e-15);
        for n in 2..500 {
            assert!(acf_confidence_bound(n + 1) < acf_confidence_bound(n));
        }
    }

    #[test]
    fn cosine_has_daily_period() {
        let series: Vec<Option<f64>> = (0..2016)
            .map(|t| Some(libm::cos(2.0 * core::f64::consts::PI * t as f64 / 24.0)))
            .collect();
        let acf = autocorrelation(&series, 168).unwrap();
        let r = |lag: usize| acf[lag - 1].r.unwrap();
        assert!(r(24) >= 0.999);
        assert!(r(12) <= -0.999);
        let best = (12..=36).max_by(|&a, &b| r(a).total_cmp(&r(b))).unwrap();
        assert_eq!(best, 24);
    }

    #[test]
    fn white_noise_stays_inside_bounds() {
        let mut s = Stream::new(99, 0, 0);
        let series: Vec<Option<f64>> = (0..2016).map(|_| Some(s.next_f64())).collect();
        let acf = autocorrelation(&series, 168).unwrap();
        let inside = acf
            .iter()
            .filter(|p| p.r.unwrap().abs() < p.bound.unwrap())
            .count();
        assert!(inside as f64 >= 0.9 * acf.len() as f64, "{inside}");
    }

    #[test]
    fn gaps_shrink_effective_n() {
        let mut series: Vec<Option<f64>> = (0..30).map(|t| Some((t % 5) as f64)).collect();
        series[10] = None;
        let acf = autocorrelation(&series, 5).unwrap();
        assert_eq!(acf[0].n_effective, 27);
        assert_eq!(acf[4].n_effective, 23);
        assert!((acf[4].r.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn undefined_lag_is_missing() {
        let series = vec![Some(1.0); 10];
        let acf = autocorrelation(&series, 3).unwrap();
        assert!(acf.iter().all(|p| p.r.is_none()));
    }

    #[test]
    fn too_short() {
        assert!(autocorrelation(&vec![Some(1.0); 10], 8).is_err());
    }
}
