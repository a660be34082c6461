//! Synthetic corpora with injected circadian and weekly mood structure.
//!
//! Each `(day, hour)` cell draws from its own random stream, so cells can be
//! generated in any order or in parallel and still yield identical records.
//! Within a cell the draw order is: record count, then per record its
//! timestamp offset, token count and tokens.
//!
//! A token belongs to mood `k` with probability
//!
//! ```text
//! rate_k(d, h) = baseline_k * (1 + amplitude_k * cos(2π (h - phase_k) / 24))
//!                           * (1 + weekly_k * cos(2π dow(d) / 7))
//! ```
//!
//! where `dow` counts from Monday = 0. Otherwise it is a uniformly chosen
//! background word.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use chrono::{DateTime, Datelike, Duration, NaiveDate, TimeZone, Utc};
use chrono_tz::Tz;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::geo::LatLon;
use crate::lexicon::{build_stemmed_lexicon, MoodLexicon};
use crate::record::TweetRecord;
use crate::rng::{domain, Stream};
use crate::signal::TermFrequencyMatrix;
use crate::textproc::stem_str;
use crate::window::parse_timezone;
use crate::HOURS_PER_DAY;

const SECONDS_PER_HOUR: u64 = 3600;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthMood {
    pub name: String,
    /// Surface words emitted for this mood, chosen uniformly.
    pub terms: Vec<String>,
    pub baseline_rate: f64,
    pub amplitude: f64,
    pub phase_hour: f64,
    pub weekly_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_days: usize,
    /// Local calendar date of day 0.
    pub start_date: NaiveDate,
    /// Zone whose civil hours the modulation follows.
    pub timezone: String,
    /// Coordinates stamped on every record.
    pub location: LatLon,
    pub records_per_hour_mean: f64,
    /// At least 1; each record carries `1 + Poisson(mean - 1)` tokens.
    pub tokens_per_record_mean: f64,
    pub vocabulary: Vec<String>,
    pub moods: Vec<SynthMood>,
    pub seed: u64,
}

fn is_plain_word(w: &str) -> bool {
    !w.is_empty() && w.bytes().all(|b| b.is_ascii_lowercase())
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_days == 0 {
            return Err(invalid("n_days must be at least 1".into()));
        }
        if !(self.records_per_hour_mean.is_finite() && self.records_per_hour_mean > 0.0) {
            return Err(invalid(format!(
                "records_per_hour_mean must be positive, got {}",
                self.records_per_hour_mean
            )));
        }
        if !(self.tokens_per_record_mean.is_finite() && self.tokens_per_record_mean >= 1.0) {
            return Err(invalid(format!(
                "tokens_per_record_mean must be at least 1, got {}",
                self.tokens_per_record_mean
            )));
        }
        parse_timezone(&self.timezone)?;
        if self.vocabulary.is_empty() {
            return Err(invalid("vocabulary is empty".into()));
        }
        if let Some(w) = self.vocabulary.iter().find(|w| !is_plain_word(w)) {
            return Err(invalid(format!("vocabulary word {w:?} is not lowercase a-z")));
        }
        if self.moods.is_empty() {
            return Err(invalid("no moods configured".into()));
        }

        let mut mood_stems = BTreeMap::new();
        let mut joint = 0.0;
        for (i, m) in self.moods.iter().enumerate() {
            if m.name.is_empty() || self.moods[..i].iter().any(|o| o.name == m.name) {
                return Err(invalid(format!("mood name {:?} is empty or repeated", m.name)));
            }
            if m.terms.is_empty() {
                return Err(invalid(format!("mood {} has no terms", m.name)));
            }
            if let Some(w) = m.terms.iter().find(|w| !is_plain_word(w)) {
                return Err(invalid(format!("{}: term {w:?} is not lowercase a-z", m.name)));
            }
            let checks = [
                ("baseline_rate", m.baseline_rate, (0.0..=1.0).contains(&m.baseline_rate)),
                ("amplitude", m.amplitude, (0.0..1.0).contains(&m.amplitude)),
                ("phase_hour", m.phase_hour, (0.0..24.0).contains(&m.phase_hour)),
                (
                    "weekly_amplitude",
                    m.weekly_amplitude,
                    (0.0..1.0).contains(&m.weekly_amplitude),
                ),
            ];
            for (field, value, ok) in checks {
                if !ok {
                    return Err(invalid(format!("{}: {field} = {value} out of range", m.name)));
                }
            }
            joint += m.baseline_rate * (1.0 + m.amplitude) * (1.0 + m.weekly_amplitude);
            for t in &m.terms {
                mood_stems.insert(stem_str(t), t);
            }
        }
        if joint > 1.0 {
            return Err(invalid(format!(
                "mood rates can reach {joint:.4} combined; at most 1 allowed"
            )));
        }
        if let Some((w, t)) = self
            .vocabulary
            .iter()
            .find_map(|w| mood_stems.get(&stem_str(w)).map(|t| (w, t)))
        {
            return Err(invalid(format!(
                "background word {w:?} stems like mood term {t:?}"
            )));
        }
        Ok(())
    }

    /// Lexicon holding the stems of each mood's terms.
    pub fn lexicon(&self) -> MoodLexicon {
        let raw = self
            .moods
            .iter()
            .map(|m| (m.name.clone(), m.terms.clone()))
            .collect();
        build_stemmed_lexicon(&raw)
    }

    /// Probability that a token in `(day, hour)` is a term of mood `k`.
    pub fn mood_rate(&self, k: usize, day: usize, hour: usize) -> f64 {
        let m = &self.moods[k];
        let dow = (self.start_date + Duration::days(day as i64))
            .weekday()
            .num_days_from_monday() as f64;
        let daily = 1.0 + m.amplitude * libm::cos(2.0 * PI * (hour as f64 - m.phase_hour) / 24.0);
        let weekly = 1.0 + m.weekly_amplitude * libm::cos(2.0 * PI * dow / 7.0);
        m.baseline_rate * daily * weekly
    }
}

/// A generated token: a background word or a term of one mood, by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordRef {
    Background(u32),
    Mood { mood: u16, term: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedRecord {
    pub timestamp: DateTime<Utc>,
    pub words: Vec<WordRef>,
}

/// Validated configuration with per-run lookups precomputed.
#[derive(Debug, Clone)]
pub struct Generator<'a> {
    config: &'a SynthConfig,
    tz: Tz,
    records: Poisson<f64>,
    extra_tokens: Option<Poisson<f64>>,
}

impl<'a> Generator<'a> {
    pub fn new(config: &'a SynthConfig) -> Result<Self> {
        config.validate()?;
        let poisson = |mean: f64| {
            Poisson::new(mean).map_err(|e| invalid(format!("poisson mean {mean}: {e}")))
        };
        let extra = config.tokens_per_record_mean - 1.0;
        Ok(Generator {
            config,
            tz: parse_timezone(&config.timezone)?,
            records: poisson(config.records_per_hour_mean)?,
            extra_tokens: if extra > 0.0 { Some(poisson(extra)?) } else { None },
        })
    }

    pub fn config(&self) -> &SynthConfig {
        self.config
    }

    /// UTC instant of local `hour:00` on day `day`. `None` for an hour
    /// skipped by a DST change; a repeated hour resolves to its first pass.
    pub fn hour_start(&self, day: usize, hour: usize) -> Option<DateTime<Utc>> {
        let date = self.config.start_date + Duration::days(day as i64);
        let local = date.and_hms_opt(hour as u32, 0, 0)?;
        self.tz
            .from_local_datetime(&local)
            .earliest()
            .map(|t| t.with_timezone(&Utc))
    }

    /// The records of one cell, in generation order.
    pub fn hour(&self, day: usize, hour: usize) -> Vec<GeneratedRecord> {
        let Some(start) = self.hour_start(day, hour) else {
            return Vec::new();
        };
        let cfg = self.config;
        let mut stream = Stream::new(cfg.seed, domain::SYNTH, (day * HOURS_PER_DAY + hour) as u64);
        let mut cumulative = Vec::with_capacity(cfg.moods.len());
        let mut acc = 0.0;
        for k in 0..cfg.moods.len() {
            acc += self.mood_rate(k, day, hour);
            cumulative.push(acc);
        }
        let n_records = self.records.sample(&mut stream) as usize;
        (0..n_records)
            .map(|_| {
                let offset = stream.below(SECONDS_PER_HOUR) as i64;
                let n_tokens = 1 + self
                    .extra_tokens
                    .as_ref()
                    .map_or(0, |p| p.sample(&mut stream) as usize);
                let words = (0..n_tokens)
                    .map(|_| {
                        let u = stream.next_f64();
                        match cumulative.iter().position(|&c| u < c) {
                            Some(k) => WordRef::Mood {
                                mood: k as u16,
                                term: stream.below(cfg.moods[k].terms.len() as u64) as u32,
                            },
                            None => WordRef::Background(
                                stream.below(cfg.vocabulary.len() as u64) as u32,
                            ),
                        }
                    })
                    .collect();
                GeneratedRecord {
                    timestamp: start + Duration::seconds(offset),
                    words,
                }
            })
            .collect()
    }

    fn mood_rate(&self, k: usize, day: usize, hour: usize) -> f64 {
        self.config.mood_rate(k, day, hour)
    }

    pub fn word(&self, w: WordRef) -> &'a str {
        match w {
            WordRef::Background(i) => &self.config.vocabulary[i as usize],
            WordRef::Mood { mood, term } => &self.config.moods[mood as usize].terms[term as usize],
        }
    }

    /// Materialize one cell as ingestible records.
    pub fn records(&self, day: usize, hour: usize) -> Vec<TweetRecord> {
        self.hour(day, hour)
            .into_iter()
            .enumerate()
            .map(|(i, g)| self.to_record(day, hour, i, &g))
            .collect()
    }

    pub fn to_record(&self, day: usize, hour: usize, index: usize, g: &GeneratedRecord) -> TweetRecord {
        let mut text = String::new();
        for (i, w) in g.words.iter().enumerate() {
            if i > 0 {
                text.push(' ');
            }
            text.push_str(self.word(*w));
        }
        TweetRecord::new(
            format!("d{day}h{hour}r{index}"),
            g.timestamp,
            Some(self.config.location),
            text,
        )
    }

    /// Count every cell straight into a matrix over `lexicon`'s stems,
    /// without going through text. Matches ingesting the generated records
    /// with a window starting at `start_date` in the same zone.
    pub fn count_matrix(&self, season_label: &str, lexicon: &MoodLexicon) -> TermFrequencyMatrix {
        let cfg = self.config;
        let mut m = TermFrequencyMatrix::new(season_label, cfg.n_days, lexicon.all_stems());
        let background: Vec<String> = cfg.vocabulary.iter().map(|w| stem_str(w)).collect();
        let terms: Vec<Vec<String>> = cfg
            .moods
            .iter()
            .map(|md| md.terms.iter().map(|w| stem_str(w)).collect())
            .collect();
        let cells = crate::par::map_iterations((cfg.n_days * HOURS_PER_DAY) as u64, |cell| {
            let cell = cell as usize;
            self.hour(cell / HOURS_PER_DAY, cell % HOURS_PER_DAY)
        });
        for (cell, records) in cells.iter().enumerate() {
            let (day, hour) = (cell / HOURS_PER_DAY, cell % HOURS_PER_DAY);
            for r in records {
                m.add_tokens(
                    day,
                    hour,
                    r.words.iter().map(|w| match *w {
                        WordRef::Background(i) => background[i as usize].as_str(),
                        WordRef::Mood { mood, term } => terms[mood as usize][term as usize].as_str(),
                    }),
                );
            }
        }
        m
    }
}

/// Every record of the corpus in `(day, hour, record)` order.
pub fn generate_corpus(config: &SynthConfig) -> Result<Vec<TweetRecord>> {
    let g = Generator::new(config)?;
    let mut out = Vec::new();
    for day in 0..config.n_days {
        for hour in 0..HOURS_PER_DAY {
            out.extend(g.records(day, hour));
        }
    }
    Ok(out)
}

impl SynthMood {
    pub fn new(name: &str, terms: &[&str], baseline_rate: f64) -> Self {
        SynthMood {
            name: name.to_string(),
            terms: terms.iter().map(|t| t.to_string()).collect(),
            baseline_rate,
            amplitude: 0.0,
            phase_hour: 0.0,
            weekly_amplitude: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textproc::tokenize;
    use crate::window::SeasonWindow;
    use alloc::vec;

    fn config() -> SynthConfig {
        SynthConfig {
            n_days: 3,
            start_date: NaiveDate::from_ymd_opt(2011, 6, 6).unwrap(),
            timezone: "Europe/London".into(),
            location: LatLon::new(51.5074, -0.1278).unwrap(),
            records_per_hour_mean: 20.0,
            tokens_per_record_mean: 6.0,
            vocabulary: vec!["the".into(), "tea".into(), "bus".into(), "rain".into()],
            moods: vec![
                SynthMood {
                    amplitude: 0.5,
                    phase_hour: 9.0,
                    ..SynthMood::new("joy", &["happy", "glad"], 0.05)
                },
                SynthMood::new("fear", &["afraid"], 0.05),
            ],
            seed: 17,
        }
    }

    #[test]
    fn same_seed_same_records() {
        let c = config();
        assert_eq!(generate_corpus(&c).unwrap(), generate_corpus(&c).unwrap());
        let other = SynthConfig { seed: 18, ..config() };
        assert_ne!(generate_corpus(&c).unwrap(), generate_corpus(&other).unwrap());
    }

    #[test]
    fn timestamps_fall_in_their_cell() {
        let c = config();
        let g = Generator::new(&c).unwrap();
        let w = SeasonWindow::new(
            "s",
            c.start_date,
            c.start_date + Duration::days(2),
            parse_timezone("Europe/London").unwrap(),
        )
        .unwrap();
        for day in 0..3 {
            for hour in 0..24 {
                for r in g.hour(day, hour) {
                    assert_eq!(w.locate(r.timestamp), Some((day, hour)));
                }
            }
        }
    }

    #[test]
    fn text_tokenizes_to_its_words() {
        let c = config();
        let g = Generator::new(&c).unwrap();
        let gen = g.hour(1, 5);
        for (i, r) in g.records(1, 5).iter().enumerate() {
            assert_eq!(tokenize(&r.text).len(), gen[i].words.len());
        }
    }

    #[test]
    fn rate_follows_the_cosine() {
        let c = config();
        assert!((c.mood_rate(0, 0, 9) - 0.075).abs() < 1e-15);
        assert!((c.mood_rate(0, 0, 21) - 0.025).abs() < 1e-15);
        assert_eq!(c.mood_rate(1, 0, 3), 0.05);
    }

    #[test]
    fn weekly_term_uses_monday_as_zero() {
        let mut c = config();
        c.moods[1].weekly_amplitude = 0.5;
        // 2011-06-06 was a Monday
        assert!((c.mood_rate(1, 0, 0) - 0.075).abs() < 1e-15);
        assert!((c.mood_rate(1, 7, 0) - 0.075).abs() < 1e-15);
        assert!(c.mood_rate(1, 3, 0) < 0.05);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = config();
        c.moods[0].baseline_rate = 0.7;
        assert!(c.validate().is_err());

        let mut c = config();
        c.vocabulary.push("happiness".into());
        assert!(c.validate().is_err());

        let mut c = config();
        c.tokens_per_record_mean = 0.5;
        assert!(c.validate().is_err());

        let mut c = config();
        c.moods[0].amplitude = 1.0;
        assert!(c.validate().is_err());

        let mut c = config();
        c.vocabulary.push("Tea".into());
        assert!(c.validate().is_err());
    }

    #[test]
    fn one_token_per_record_when_mean_is_one() {
        let c = SynthConfig {
            tokens_per_record_mean: 1.0,
            ..config()
        };
        let g = Generator::new(&c).unwrap();
        assert!(g.hour(0, 0).iter().all(|r| r.words.len() == 1));
    }

    #[test]
    fn skipped_dst_hour_is_empty() {
        let c = SynthConfig {
            start_date: NaiveDate::from_ymd_opt(2011, 3, 27).unwrap(),
            ..config()
        };
        let g = Generator::new(&c).unwrap();
        assert!(g.hour_start(0, 1).is_none());
        assert!(g.hour(0, 1).is_empty());
        assert!(!g.hour(0, 2).is_empty());
    }

    #[test]
    fn count_matrix_matches_counting_text() {
        let c = config();
        let g = Generator::new(&c).unwrap();
        let lex = c.lexicon();
        let direct = g.count_matrix("s", &lex);
        let mut via_text = TermFrequencyMatrix::new("s", c.n_days, lex.all_stems());
        for day in 0..c.n_days {
            for hour in 0..24 {
                for r in g.records(day, hour) {
                    let stems: Vec<String> = tokenize(&r.text)
                        .iter()
                        .map(crate::textproc::porter_stem)
                        .collect();
                    via_text.add_tokens(day, hour, stems.iter().map(String::as_str));
                }
            }
        }
        assert_eq!(direct, via_text);
        assert!(direct.token_total() > 0);
    }
}
