//! Per-mood affect word lists, their stemmed form, and confound screening.
//!
//! Raw lists come from a plain-text file: `[mood]` headers on their own
//! line, one word per line, `#` comments, blank lines ignored. Any header
//! name is accepted as a mood; the four used throughout are fear, sadness,
//! joy and anger.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::stats::correlation::pearson;
use crate::textproc::{porter_stem, tokenize};

pub const FEAR: &str = "fear";
pub const SADNESS: &str = "sadness";
pub const JOY: &str = "joy";
pub const ANGER: &str = "anger";

/// Correlation magnitude at or above which a term is removed as confounded.
pub const DEFAULT_CONFOUND_THRESHOLD: f64 = 0.85;

/// Word lists as read, before stemming.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawLexicon {
    pub moods: BTreeMap<String, Vec<String>>,
    pub warnings: Vec<String>,
}

fn valid_mood_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Parse the lexicon file format. Words keep their order and duplicates.
pub fn parse_raw_lexicon(text: &str) -> Result<RawLexicon> {
    let mut lexicon = RawLexicon::default();
    let mut current: Option<String> = None;
    for (idx, line) in text.lines().enumerate() {
        let line = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            let name = line
                .strip_prefix('[')
                .and_then(|l| l.strip_suffix(']'))
                .map(str::trim)
                .filter(|n| valid_mood_name(n))
                .ok_or_else(|| Error::UnknownSection(line.to_string()))?
                .to_ascii_lowercase();
            lexicon.moods.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let mood = current
            .as_ref()
            .ok_or(Error::WordOutsideSection { line: idx + 1 })?;
        lexicon
            .moods
            .get_mut(mood)
            .expect("section registered on header")
            .push(line.to_string());
    }
    for (mood, words) in &lexicon.moods {
        if words.is_empty() {
            lexicon.warnings.push(format!("mood {mood:?} has no words"));
        }
    }
    Ok(lexicon)
}

/// Per-mood counts at each preparation stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StageCounts {
    pub raw_words: usize,
    pub skipped: usize,
    pub distinct_stems: usize,
    pub excluded: usize,
}

impl StageCounts {
    pub fn active(&self) -> usize {
        self.distinct_stems - self.excluded
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScreenDecision {
    Keep,
    Remove,
    /// One of the series was constant, so no correlation exists; the term is
    /// kept.
    Undetermined,
}

impl ScreenDecision {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScreenDecision::Keep => "keep",
            ScreenDecision::Remove => "remove",
            ScreenDecision::Undetermined => "undetermined (constant series)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenOutcome {
    pub correlation: Option<f64>,
    pub decision: ScreenDecision,
}

/// Compare a term's hourly relative frequencies against a confound's and
/// decide whether the term must go: remove iff `|r| >= threshold`.
pub fn screen_confound(
    term_series: &[Option<f64>],
    confound_series: &[Option<f64>],
    threshold: f64,
) -> Result<ScreenOutcome> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidParameter(format!(
            "confound threshold {threshold} outside [0, 1]"
        )));
    }
    if term_series.len() != confound_series.len() {
        return Err(Error::LengthMismatch {
            left: term_series.len(),
            right: confound_series.len(),
        });
    }
    match pearson(term_series, confound_series) {
        Ok(r) => Ok(ScreenOutcome {
            correlation: Some(r),
            decision: if libm::fabs(r) >= threshold {
                ScreenDecision::Remove
            } else {
                ScreenDecision::Keep
            },
        }),
        Err(Error::UndefinedCorrelation) => Ok(ScreenOutcome {
            correlation: None,
            decision: ScreenDecision::Undetermined,
        }),
        Err(e) => Err(e),
    }
}

/// One screening performed against a mood's term.
#[derive(Debug, Clone, PartialEq)]
pub struct Screening {
    pub mood: String,
    pub stem: String,
    pub confound_stem: String,
    pub outcome: ScreenOutcome,
}

/// Mood name to active stem set, plus every screening applied.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MoodLexicon {
    entries: BTreeMap<String, BTreeSet<String>>,
    counts: BTreeMap<String, StageCounts>,
    screenings: Vec<Screening>,
    warnings: Vec<String>,
}

/// Stem every word (first token only), deduplicating per mood.
pub fn build_stemmed_lexicon(raw: &BTreeMap<String, Vec<String>>) -> MoodLexicon {
    let mut lexicon = MoodLexicon::default();
    for (mood, words) in raw {
        let mut stems = BTreeSet::new();
        let mut counts = StageCounts {
            raw_words: words.len(),
            ..StageCounts::default()
        };
        for word in words {
            match tokenize(word).first() {
                Some(token) => {
                    stems.insert(porter_stem(token));
                }
                None => {
                    counts.skipped += 1;
                    lexicon
                        .warnings
                        .push(format!("{mood}: word {word:?} has no letters; skipped"));
                }
            }
        }
        counts.distinct_stems = stems.len();
        lexicon.entries.insert(mood.clone(), stems);
        lexicon.counts.insert(mood.clone(), counts);
    }
    lexicon
}

impl MoodLexicon {
    /// A lexicon from stems that are already in stemmed form.
    pub fn from_stem_sets<I, M, S>(sets: I) -> Self
    where
        I: IntoIterator<Item = (M, S)>,
        M: Into<String>,
        S: IntoIterator,
        S::Item: Into<String>,
    {
        let mut lexicon = MoodLexicon::default();
        for (mood, stems) in sets {
            let mood = mood.into();
            let set: BTreeSet<String> = stems.into_iter().map(Into::into).collect();
            lexicon.counts.insert(
                mood.clone(),
                StageCounts {
                    raw_words: set.len(),
                    skipped: 0,
                    distinct_stems: set.len(),
                    excluded: 0,
                },
            );
            lexicon.entries.insert(mood, set);
        }
        lexicon
    }

    pub fn moods(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn contains_mood(&self, mood: &str) -> bool {
        self.entries.contains_key(mood)
    }

    /// Active stems of `mood`, sorted.
    pub fn stems(&self, mood: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(mood)
    }

    /// Union of every mood's active stems.
    pub fn all_stems(&self) -> BTreeSet<String> {
        self.entries.values().flatten().cloned().collect()
    }

    pub fn counts(&self, mood: &str) -> Option<StageCounts> {
        self.counts.get(mood).copied()
    }

    pub fn screenings(&self) -> &[Screening] {
        &self.screenings
    }

    /// Removed stems of `mood` with the correlation that removed them.
    pub fn exclusions<'a>(&'a self, mood: &'a str) -> impl Iterator<Item = &'a Screening> + 'a {
        self.screenings
            .iter()
            .filter(move |s| s.mood == mood && s.outcome.decision == ScreenDecision::Remove)
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Record a screening; a `Remove` drops the stem from the mood's active
    /// set.
    pub fn apply_screening(
        &mut self,
        mood: &str,
        stem: &str,
        confound_stem: &str,
        outcome: ScreenOutcome,
    ) -> Result<()> {
        let set = self
            .entries
            .get_mut(mood)
            .ok_or_else(|| Error::EmptyMood(mood.to_string()))?;
        if outcome.decision == ScreenDecision::Remove && set.remove(stem) {
            if let Some(c) = self.counts.get_mut(mood) {
                c.excluded += 1;
            }
        }
        self.screenings.push(Screening {
            mood: mood.to_string(),
            stem: stem.to_string(),
            confound_stem: confound_stem.to_string(),
            outcome,
        });
        Ok(())
    }
}
