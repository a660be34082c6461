//! From per-bin stem counts to standardized mood scores and 24-hour
//! profiles.
//!
//! For each stem the relative frequency `count / total` is computed per
//! hourly bin, then standardized (mean 0, sample sd 1) over the whole
//! seasonal series. A mood's score in a bin is the mean of its stems'
//! standardized values there. Bins that saw no tokens at all are missing,
//! never zero.
//!
//! Summation always runs in bin order, and over stems in sorted order.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lexicon::MoodLexicon;
use crate::numeric::{all_equal, mean_var, sqrt};
use crate::stats::DayVector;
use crate::HOURS_PER_DAY;

/// Stem counts and total token counts per hourly bin of one season.
/// Bins are laid out day-major: `bin = day * 24 + hour`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermFrequencyMatrix {
    season_label: String,
    n_days: usize,
    stems: Vec<String>,
    index: BTreeMap<String, usize>,
    counts: Vec<u64>,
    totals: Vec<u64>,
}

impl TermFrequencyMatrix {
    /// An all-zero matrix tracking `stems` (deduplicated and sorted).
    pub fn new<I, S>(season_label: &str, n_days: usize, stems: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut stems: Vec<String> = stems.into_iter().map(Into::into).collect();
        stems.sort();
        stems.dedup();
        let index = stems
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let n_bins = n_days * HOURS_PER_DAY;
        TermFrequencyMatrix {
            season_label: season_label.to_string(),
            n_days,
            counts: vec![0; n_bins * stems.len()],
            totals: vec![0; n_bins],
            stems,
            index,
        }
    }

    /// Rebuild from stored counts. `counts` is bin-major with one column per
    /// stem in the order given; stems must be sorted and unique.
    pub fn from_parts(
        season_label: &str,
        n_days: usize,
        stems: Vec<String>,
        counts: Vec<u64>,
        totals: Vec<u64>,
    ) -> Result<Self> {
        let n_bins = n_days * HOURS_PER_DAY;
        if !stems.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::ShapeMismatch("stems not sorted and unique".into()));
        }
        if totals.len() != n_bins || counts.len() != n_bins * stems.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} totals and {} counts for {n_bins} bins x {} stems",
                totals.len(),
                counts.len(),
                stems.len()
            )));
        }
        for (bin, &total) in totals.iter().enumerate() {
            let row = &counts[bin * stems.len()..(bin + 1) * stems.len()];
            if row.iter().any(|&c| c > total) {
                return Err(Error::ShapeMismatch(format!(
                    "bin {bin}: a stem count exceeds the bin total"
                )));
            }
        }
        let mut m = TermFrequencyMatrix::new(season_label, n_days, stems);
        m.counts = counts;
        m.totals = totals;
        Ok(m)
    }

    pub fn season_label(&self) -> &str {
        &self.season_label
    }

    pub fn n_days(&self) -> usize {
        self.n_days
    }

    pub fn n_bins(&self) -> usize {
        self.totals.len()
    }

    pub fn stems(&self) -> &[String] {
        &self.stems
    }

    pub fn stem_index(&self, stem: &str) -> Option<usize> {
        self.index.get(stem).copied()
    }

    pub fn count(&self, bin: usize, stem_index: usize) -> u64 {
        self.counts[bin * self.stems.len() + stem_index]
    }

    pub fn total(&self, bin: usize) -> u64 {
        self.totals[bin]
    }

    pub fn totals(&self) -> &[u64] {
        &self.totals
    }

    /// Row of stem counts for one bin, in stem order.
    pub fn bin_counts(&self, bin: usize) -> &[u64] {
        let w = self.stems.len();
        &self.counts[bin * w..(bin + 1) * w]
    }

    pub fn token_total(&self) -> u64 {
        self.totals.iter().sum()
    }

    /// Count a run of stemmed tokens falling in `(day, hour)`. Every token
    /// adds to the bin total; tracked stems also add to their own count.
    pub fn add_tokens<'a, I>(&mut self, day: usize, hour: usize, stemmed: I)
    where
        I: IntoIterator<Item = &'a str>,
    {
        let bin = day * HOURS_PER_DAY + hour;
        let w = self.stems.len();
        for stem in stemmed {
            self.totals[bin] += 1;
            if let Some(&i) = self.index.get(stem) {
                self.counts[bin * w + i] += 1;
            }
        }
    }

    /// Count tokens already resolved to stem columns: `tokens` in all, one
    /// entry in `hits` per token that matched a tracked stem.
    pub fn add_resolved(&mut self, day: usize, hour: usize, tokens: u64, hits: &[usize]) {
        assert!(hits.len() as u64 <= tokens, "more hits than tokens");
        let bin = day * HOURS_PER_DAY + hour;
        let w = self.stems.len();
        self.totals[bin] += tokens;
        for &i in hits {
            self.counts[bin * w + i] += 1;
        }
    }

    /// Add `other` bin by bin. Both must describe the same season and stems.
    pub fn merge(&mut self, other: &TermFrequencyMatrix) -> Result<()> {
        if self.season_label != other.season_label
            || self.n_days != other.n_days
            || self.stems != other.stems
        {
            return Err(Error::ShapeMismatch(format!(
                "cannot merge {} ({} days) into {} ({} days)",
                other.season_label, other.n_days, self.season_label, self.n_days
            )));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        for (a, b) in self.totals.iter_mut().zip(&other.totals) {
            *a += b;
        }
        Ok(())
    }

    /// Every count and total multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        let mut m = self.clone();
        m.counts.iter_mut().for_each(|c| *c *= factor);
        m.totals.iter_mut().for_each(|t| *t *= factor);
        m
    }
}

/// Count stemmed tokens per bin against the union of the lexicon's stems.
/// Stems shared by several moods are counted once.
pub fn count_terms<I, T, S>(season_label: &str, n_days: usize, binned: I, lexicon: &MoodLexicon) -> TermFrequencyMatrix
where
    I: IntoIterator<Item = (usize, usize, T)>,
    T: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut m = TermFrequencyMatrix::new(season_label, n_days, lexicon.all_stems());
    for (day, hour, tokens) in binned {
        let tokens: Vec<S> = tokens.into_iter().collect();
        m.add_tokens(day, hour, tokens.iter().map(AsRef::as_ref));
    }
    m
}

/// `count / total` per bin; missing where the bin saw no tokens.
pub fn relative_frequency(m: &TermFrequencyMatrix, stem: &str) -> Result<Vec<Option<f64>>> {
    let s = m
        .stem_index(stem)
        .ok_or_else(|| Error::UnknownStem(stem.to_string()))?;
    Ok((0..m.n_bins())
        .map(|bin| {
            let total = m.total(bin);
            (total > 0).then(|| m.count(bin, s) as f64 / total as f64)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Standardized {
    pub values: Vec<Option<f64>>,
    pub mean: f64,
    pub sd: f64,
    /// All observed values were equal; every one became 0.
    pub zero_variance: bool,
}

/// z-score the observed entries with their mean and sample standard
/// deviation; missing entries stay missing.
pub fn standardize(series: &[Option<f64>]) -> Result<Standardized> {
    let observed = || series.iter().flatten().copied();
    let (mean, var, n) = mean_var(observed()).unwrap_or((0.0, 0.0, 0));
    if n < 2 {
        return Err(Error::TooFewObservations { needed: 2, found: n });
    }
    let sd = sqrt(var);
    if all_equal(observed()) || sd == 0.0 {
        return Ok(Standardized {
            values: series.iter().map(|v| v.map(|_| 0.0)).collect(),
            mean,
            sd: 0.0,
            zero_variance: true,
        });
    }
    Ok(Standardized {
        values: series.iter().map(|v| v.map(|x| (x - mean) / sd)).collect(),
        mean,
        sd,
        zero_variance: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermFlag {
    Active,
    /// Constant relative frequency over the season; left out of the average.
    ZeroVariance,
}

/// Hourly mood scores for one season, `n_days x 24`.
#[derive(Debug, Clone, PartialEq)]
pub struct MoodScoreSeries {
    pub mood: String,
    pub season_label: String,
    pub values: Vec<Option<f64>>,
    pub n_terms: usize,
    pub term_flags: Vec<(String, TermFlag)>,
}

impl MoodScoreSeries {
    pub fn n_days(&self) -> usize {
        self.values.len() / HOURS_PER_DAY
    }

    pub fn value(&self, day: usize, hour: usize) -> Option<f64> {
        self.values[day * HOURS_PER_DAY + hour]
    }

    pub fn day(&self, day: usize) -> DayVector {
        core::array::from_fn(|h| self.value(day, h))
    }
}

/// Standardize each of the mood's stems over the season and average them
/// per bin. Stems with zero variance are dropped from the average.
pub fn mood_score(m: &TermFrequencyMatrix, lexicon: &MoodLexicon, mood: &str) -> Result<MoodScoreSeries> {
    let stems = lexicon
        .stems(mood)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::EmptyMood(mood.to_string()))?;

    let mut term_flags = Vec::with_capacity(stems.len());
    let mut z_series: Vec<Vec<Option<f64>>> = Vec::new();
    for stem in stems {
        let z = standardize(&relative_frequency(m, stem)?)?;
        if z.zero_variance {
            term_flags.push((stem.clone(), TermFlag::ZeroVariance));
        } else {
            term_flags.push((stem.clone(), TermFlag::Active));
            z_series.push(z.values);
        }
    }
    if z_series.is_empty() {
        return Err(Error::Unmeasurable(mood.to_string()));
    }

    let n_terms = z_series.len();
    let values = (0..m.n_bins())
        .map(|bin| {
            if m.total(bin) == 0 {
                return None;
            }
            let mut sum = 0.0;
            for z in &z_series {
                sum += z[bin].expect("observed bin");
            }
            Some(sum / n_terms as f64)
        })
        .collect();

    Ok(MoodScoreSeries {
        mood: mood.to_string(),
        season_label: m.season_label().to_string(),
        values,
        n_terms,
        term_flags,
    })
}

/// Standard error of the mean: sample sd over the square root of the count,
/// 0 for fewer than two observations or identical ones.
pub fn hourly_sem(observations: &[f64]) -> f64 {
    if all_equal(observations.iter().copied()) {
        return 0.0;
    }
    match mean_var(observations.iter().copied()) {
        Some((_, var, n)) if n > 1 => sqrt(var) / sqrt(n as f64),
        _ => 0.0,
    }
}

/// Mean 24-hour pattern with its standard error band.
#[derive(Debug, Clone, PartialEq)]
pub struct CircadianProfile {
    pub mood: String,
    /// A season label, or `aggregate`.
    pub scope: String,
    /// `None` where no day had an observation at that hour.
    pub mean: [Option<f64>; HOURS_PER_DAY],
    pub sem: [f64; HOURS_PER_DAY],
    pub n_obs: [usize; HOURS_PER_DAY],
}

impl CircadianProfile {
    pub fn missing_hours(&self) -> impl Iterator<Item = usize> + '_ {
        (0..HOURS_PER_DAY).filter(|&h| self.mean[h].is_none())
    }

    /// First hour attaining the largest mean.
    pub fn peak_hour(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (h, v) in self.mean.iter().enumerate() {
            if let Some(v) = *v {
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((h, v));
                }
            }
        }
        best.map(|(h, _)| h)
    }
}

/// Average the days of one or more seasonal series hour by hour. Several
/// series are pooled day-wise, without re-standardizing.
pub fn circadian_profile(series: &[&MoodScoreSeries], scope: &str) -> Result<CircadianProfile> {
    let first = series
        .first()
        .ok_or(Error::TooFewObservations { needed: 1, found: 0 })?;
    if series.iter().all(|s| s.n_days() == 0) {
        return Err(Error::TooFewObservations { needed: 1, found: 0 });
    }
    let mut mean = [None; HOURS_PER_DAY];
    let mut sem = [0.0; HOURS_PER_DAY];
    let mut n_obs = [0usize; HOURS_PER_DAY];
    let mut obs = Vec::new();
    for h in 0..HOURS_PER_DAY {
        obs.clear();
        for s in series {
            obs.extend((0..s.n_days()).filter_map(|d| s.value(d, h)));
        }
        n_obs[h] = obs.len();
        if let Some((m, _, _)) = mean_var(obs.iter().copied()) {
            mean[h] = Some(m);
            sem[h] = hourly_sem(&obs);
        }
    }
    Ok(CircadianProfile {
        mood: first.mood.clone(),
        scope: scope.to_string(),
        mean,
        sem,
        n_obs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex(pairs: &[(&str, &[&str])]) -> MoodLexicon {
        MoodLexicon::from_stem_sets(pairs.iter().map(|(m, s)| (*m, s.iter().copied())))
    }

    #[test]
    fn counts_tokens_in_a_bin() {
        let l = lex(&[("joy", &["happi"]), ("sadness", &["sad"])]);
        let m = count_terms(
            "s",
            2,
            [(0, 3, vec!["happi", "sad", "happi", "the"])],
            &l,
        );
        let bin = 3;
        assert_eq!(m.count(bin, m.stem_index("happi").unwrap()), 2);
        assert_eq!(m.count(bin, m.stem_index("sad").unwrap()), 1);
        assert_eq!(m.total(bin), 4);
        assert_eq!(m.total(4), 0);
        assert_eq!(m.bin_counts(4), [0, 0]);
    }

    #[test]
    fn shared_stem_counted_once() {
        let l = lex(&[("joy", &["cri"]), ("sadness", &["cri"])]);
        let m = count_terms("s", 2, [(0, 0, vec!["cri"])], &l);
        assert_eq!(m.stems(), ["cri"]);
        assert_eq!(m.count(0, 0), 1);
    }

    #[test]
    fn relative_frequency_conventions() {
        let l = lex(&[("joy", &["happi"])]);
        let mut m = count_terms("s", 2, [(0, 0, vec!["happi", "happi", "a", "b"])], &l);
        m.add_tokens(0, 1, core::iter::repeat_n("x", 100));
        let rf = relative_frequency(&m, "happi").unwrap();
        assert_eq!(rf[0], Some(0.5));
        assert_eq!(rf[1], Some(0.0));
        assert_eq!(rf[2], None);
        assert!(matches!(
            relative_frequency(&m, "nope"),
            Err(Error::UnknownStem(_))
        ));
    }

    #[test]
    fn standardize_examples() {
        let z = standardize(&[Some(1.0), Some(2.0), Some(3.0)]).unwrap();
        assert_eq!(z.values, [Some(-1.0), Some(0.0), Some(1.0)]);

        let flat = standardize(&[Some(5.0), Some(5.0), Some(5.0)]).unwrap();
        assert!(flat.zero_variance);
        assert_eq!(flat.values, [Some(0.0); 3]);

        // mean 2, sample sd sqrt(2)
        let gap = standardize(&[Some(1.0), None, Some(3.0)]).unwrap();
        assert!((gap.values[0].unwrap() + 0.7071).abs() < 1e-4);
        assert_eq!(gap.values[1], None);
        assert!((gap.values[2].unwrap() - 0.7071).abs() < 1e-4);

        assert!(standardize(&[Some(1.0), None]).is_err());
    }

    fn two_day_matrix() -> TermFrequencyMatrix {
        let l = lex(&[("joy", &["a", "b"])]);
        let mut m = TermFrequencyMatrix::new("s", 2, l.all_stems());
        for bin in 0..48 {
            let (d, h) = (bin / 24, bin % 24);
            let a = (bin * 7) % 5;
            let b = 4 - a;
            let mut tokens = vec!["a"; a];
            tokens.extend(vec!["b"; b]);
            tokens.extend(vec!["z"; 6]);
            m.add_tokens(d, h, tokens);
        }
        m
    }

    #[test]
    fn one_stem_score_is_its_z_series() {
        let m = two_day_matrix();
        let l = lex(&[("joy", &["a"])]);
        let s = mood_score(&m, &l, "joy").unwrap();
        let z = standardize(&relative_frequency(&m, "a").unwrap()).unwrap();
        assert_eq!(s.values, z.values);
        assert_eq!(s.n_terms, 1);
    }

    #[test]
    fn opposite_stems_cancel() {
        // a + b is constant per bin, so their z-series are exact negations
        let m = two_day_matrix();
        let l = lex(&[("joy", &["a", "b"])]);
        let s = mood_score(&m, &l, "joy").unwrap();
        assert!(s.values.iter().all(|v| v.unwrap().abs() < 1e-12));
    }

    #[test]
    fn zero_variance_stems_are_dropped() {
        let l = lex(&[("joy", &["a", "never"])]);
        let mut m = TermFrequencyMatrix::new("s", 2, l.all_stems());
        for bin in 0..48 {
            m.add_tokens(bin / 24, bin % 24, core::iter::repeat_n("a", bin % 3).chain(["z"]));
        }
        let s = mood_score(&m, &l, "joy").unwrap();
        assert_eq!(s.n_terms, 1);
        assert!(s.term_flags.contains(&("never".to_string(), TermFlag::ZeroVariance)));

        let only_flat = lex(&[("joy", &["never"])]);
        assert!(matches!(
            mood_score(&m, &only_flat, "joy"),
            Err(Error::Unmeasurable(_))
        ));
        assert!(matches!(
            mood_score(&m, &only_flat, "fear"),
            Err(Error::EmptyMood(_))
        ));
    }

    #[test]
    fn empty_bins_are_missing_scores() {
        let l = lex(&[("joy", &["a"])]);
        let mut m = TermFrequencyMatrix::new("s", 2, l.all_stems());
        for bin in 1..48 {
            m.add_tokens(bin / 24, bin % 24, core::iter::repeat_n("a", bin % 4).chain(["z"]));
        }
        let s = mood_score(&m, &l, "joy").unwrap();
        assert_eq!(s.values[0], None);
        assert!(s.values[1..].iter().all(Option::is_some));
    }

    #[test]
    fn sem_examples() {
        assert_eq!(hourly_sem(&[2.0]), 0.0);
        assert!((hourly_sem(&[1.0, 3.0]) - 1.0).abs() < 1e-15);
        assert_eq!(hourly_sem(&[0.3, 0.3, 0.3]), 0.0);
    }

    fn series_of(days: &[[f64; 24]]) -> MoodScoreSeries {
        MoodScoreSeries {
            mood: "joy".into(),
            season_label: "s".into(),
            values: days.iter().flat_map(|d| d.iter().map(|&v| Some(v))).collect(),
            n_terms: 1,
            term_flags: vec![],
        }
    }

    #[test]
    fn profile_examples() {
        let day: [f64; 24] = core::array::from_fn(|h| h as f64 * 0.1);
        let same = series_of(&[day, day]);
        let p = circadian_profile(&[&same], "s").unwrap();
        for h in 0..24 {
            assert!((p.mean[h].unwrap() - day[h]).abs() < 1e-15);
            assert_eq!(p.sem[h], 0.0);
            assert_eq!(p.n_obs[h], 2);
        }

        let spread = series_of(&[[1.0; 24], [3.0; 24]]);
        let p = circadian_profile(&[&spread], "s").unwrap();
        assert!(p.mean.iter().all(|m| *m == Some(2.0)));
        assert!(p.sem.iter().all(|s| (s - 1.0).abs() < 1e-15));
    }

    #[test]
    fn profile_pools_seasons_and_flags_gaps() {
        let a = series_of(&[[1.0; 24]]);
        let mut b = series_of(&[[3.0; 24]]);
        b.values[5] = None;
        let p = circadian_profile(&[&a, &b], "aggregate").unwrap();
        assert_eq!(p.n_obs[5], 1);
        assert_eq!(p.mean[5], Some(1.0));
        assert_eq!(p.mean[6], Some(2.0));

        let mut c = series_of(&[[1.0; 24]]);
        c.values[7] = None;
        let p = circadian_profile(&[&c], "s").unwrap();
        assert_eq!(p.missing_hours().collect::<Vec<_>>(), [7]);
    }

    #[test]
    fn merge_requires_same_shape() {
        let mut a = two_day_matrix();
        let b = two_day_matrix();
        a.merge(&b).unwrap();
        assert_eq!(a.token_total(), 2 * b.token_total());
        let other = TermFrequencyMatrix::new("t", 2, ["a", "b"]);
        assert!(a.merge(&other).is_err());
    }

    #[test]
    fn from_parts_validates() {
        let m = two_day_matrix();
        let counts: Vec<u64> = (0..m.n_bins()).flat_map(|b| m.bin_counts(b).to_vec()).collect();
        let rebuilt =
            TermFrequencyMatrix::from_parts("s", 2, m.stems().to_vec(), counts.clone(), m.totals().to_vec()).unwrap();
        assert_eq!(rebuilt, m);
        let mut bad_totals = m.totals().to_vec();
        bad_totals[0] = 0;
        assert!(TermFrequencyMatrix::from_parts("s", 2, m.stems().to_vec(), counts, bad_totals).is_err());
    }
}
