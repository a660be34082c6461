use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numeric::sqrt;
use crate::HOURS_PER_DAY;

use super::days::{DaySeriesSet, DayVector};

/// Product-moment correlation and the number of pairs it used. Indices where
/// either side is missing are dropped first.
pub fn pearson_with_n(x: &[Option<f64>], y: &[Option<f64>]) -> Result<(f64, usize)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let pairs = || {
        x.iter()
            .zip(y)
            .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
    };
    let mut n = 0usize;
    let (mut sx, mut sy) = (0.0, 0.0);
    for (a, b) in pairs() {
        sx += a;
        sy += b;
        n += 1;
    }
    if n < 3 {
        return Err(Error::TooFewObservations { needed: 3, found: n });
    }
    let mx = sx / n as f64;
    let my = sy / n as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    let mut first: Option<(f64, f64)> = None;
    let (mut x_varies, mut y_varies) = (false, false);
    for (a, b) in pairs() {
        match first {
            None => first = Some((a, b)),
            Some((a0, b0)) => {
                x_varies |= a != a0;
                y_varies |= b != b0;
            }
        }
        let dx = a - mx;
        let dy = b - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if !x_varies || !y_varies || sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    let r = sxy / (sqrt(sxx) * sqrt(syy));
    Ok((r.clamp(-1.0, 1.0), n))
}

/// Pearson correlation with pairwise deletion of missing values.
pub fn pearson(x: &[Option<f64>], y: &[Option<f64>]) -> Result<f64> {
    pearson_with_n(x, y).map(|(r, _)| r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseCorrelation {
    pub mean: f64,
    pub used_pairs: usize,
    /// Pairs whose correlation was undefined (a constant day, or fewer than
    /// three shared hours).
    pub skipped_pairs: usize,
}

/// Average Pearson correlation over all unordered pairs of days.
pub fn mean_pairwise_day_correlation(d: &DaySeriesSet) -> Result<PairwiseCorrelation> {
    if d.days.len() < 2 {
        return Err(Error::TooFewObservations {
            needed: 2,
            found: d.days.len(),
        });
    }
    if d.is_complete() {
        UnitDays::new(&d.days).mean_pairwise()
    } else {
        brute_force_mean_pairwise(&d.days)
    }
}

/// Every pair evaluated separately; needed once days have gaps, since
/// pairwise deletion changes each pair's means.
pub(crate) fn brute_force_mean_pairwise(days: &[DayVector]) -> Result<PairwiseCorrelation> {
    let mut sum = 0.0;
    let mut used = 0usize;
    let mut skipped = 0usize;
    for i in 0..days.len() {
        for j in (i + 1)..days.len() {
            match pearson(&days[i], &days[j]) {
                Ok(r) => {
                    sum += r;
                    used += 1;
                }
                Err(Error::UndefinedCorrelation) | Err(Error::TooFewObservations { .. }) => {
                    skipped += 1
                }
                Err(e) => return Err(e),
            }
        }
    }
    if used == 0 {
        return Err(Error::NoUsablePairs);
    }
    Ok(PairwiseCorrelation {
        mean: sum / used as f64,
        used_pairs: used,
        skipped_pairs: skipped,
    })
}

/// Complete days centred and scaled to unit length, so the correlation of a
/// pair is a plain dot product and the mean over all pairs is
/// `(|sum u_i|^2 - sum |u_i|^2) / (2 P)`. Shuffling a day's values permutes
/// its unit vector without changing its mean or norm.
pub(crate) struct UnitDays {
    pub(crate) units: Vec<[f64; HOURS_PER_DAY]>,
    total_days: usize,
}

impl UnitDays {
    pub(crate) fn new(days: &[DayVector]) -> Self {
        let mut units = Vec::with_capacity(days.len());
        for day in days {
            let values: [f64; HOURS_PER_DAY] =
                core::array::from_fn(|h| day[h].expect("complete day"));
            if crate::numeric::all_equal(values.iter().copied()) {
                continue;
            }
            let mean = values.iter().sum::<f64>() / HOURS_PER_DAY as f64;
            let mut centred = values.map(|v| v - mean);
            let norm = sqrt(centred.iter().map(|v| v * v).sum::<f64>());
            if norm == 0.0 {
                continue;
            }
            centred.iter_mut().for_each(|v| *v /= norm);
            units.push(centred);
        }
        UnitDays {
            units,
            total_days: days.len(),
        }
    }

    fn skipped_pairs(&self) -> usize {
        let m = self.units.len();
        let all = self.total_days * (self.total_days - 1) / 2;
        all - m * m.saturating_sub(1) / 2
    }

    pub(crate) fn mean_pairwise(&self) -> Result<PairwiseCorrelation> {
        let mut column_sums = [0.0; HOURS_PER_DAY];
        for u in &self.units {
            for (s, v) in column_sums.iter_mut().zip(u) {
                *s += v;
            }
        }
        self.finish(&column_sums)
    }

    /// Mean pairwise correlation once each day is permuted; `permute(i, u)`
    /// writes day `i`'s permuted unit vector into `u`.
    pub(crate) fn mean_pairwise_permuted<F>(&self, mut permute: F) -> Result<PairwiseCorrelation>
    where
        F: FnMut(usize, &mut [f64; HOURS_PER_DAY]),
    {
        let mut column_sums = [0.0; HOURS_PER_DAY];
        let mut scratch = [0.0; HOURS_PER_DAY];
        for (i, u) in self.units.iter().enumerate() {
            scratch.copy_from_slice(u);
            permute(i, &mut scratch);
            for (s, v) in column_sums.iter_mut().zip(&scratch) {
                *s += v;
            }
        }
        self.finish(&column_sums)
    }

    fn finish(&self, column_sums: &[f64; HOURS_PER_DAY]) -> Result<PairwiseCorrelation> {
        let m = self.units.len();
        if m < 2 {
            return Err(Error::NoUsablePairs);
        }
        let pairs = m * (m - 1) / 2;
        let squared_total: f64 = column_sums.iter().map(|s| s * s).sum();
        let self_terms: f64 = self
            .units
            .iter()
            .map(|u| u.iter().map(|v| v * v).sum::<f64>())
            .sum();
        Ok(PairwiseCorrelation {
            mean: (squared_total - self_terms) / (2.0 * pairs as f64),
            used_pairs: pairs,
            skipped_pairs: self.skipped_pairs(),
        })
    }
}
