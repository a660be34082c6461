//! TOML run and synthesis configuration.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use moodcycle_core::geo::LatLon;
use moodcycle_core::lexicon::DEFAULT_CONFOUND_THRESHOLD;
use moodcycle_core::stats::{DEFAULT_BOOTSTRAPS, DEFAULT_PERMUTATIONS};
use moodcycle_core::synth::{SynthConfig, SynthMood};
use moodcycle_core::window::{parse_timezone, SeasonWindow, DEFAULT_TIMEZONE};
use serde::{Deserialize, Deserializer};

use crate::error::{usage, AppError, AppResult};
use crate::records::RecordFormat;

pub const DEFAULT_MAX_LAG: usize = 168;

/// A calendar date written either as a bare TOML date or a string.
fn date<'de, D: Deserializer<'de>>(d: D) -> Result<NaiveDate, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Date(toml::value::Datetime),
        Text(String),
    }
    let text = match Raw::deserialize(d)? {
        Raw::Date(dt) => dt.to_string(),
        Raw::Text(s) => s,
    };
    NaiveDate::parse_from_str(&text, "%Y-%m-%d")
        .map_err(|_| serde::de::Error::custom(format!("{text:?} is not a YYYY-MM-DD date")))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeasonEntry {
    label: String,
    #[serde(deserialize_with = "date")]
    start: NaiveDate,
    #[serde(deserialize_with = "date")]
    end: NaiveDate,
    timezone: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Confound {
    pub mood: String,
    /// Lexicon word screened; stemmed before use.
    pub term: String,
    /// Word it is compared against; stemmed before use.
    pub confound: String,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_threshold() -> f64 {
    DEFAULT_CONFOUND_THRESHOLD
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunFile {
    centres: Option<PathBuf>,
    lexicon: Option<PathBuf>,
    timezone: Option<String>,
    radius_km: Option<f64>,
    format: Option<String>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    permutations: Option<u64>,
    bootstraps: Option<u64>,
    max_lag: Option<usize>,
    #[serde(default)]
    season: Vec<SeasonEntry>,
    #[serde(default)]
    confound: Vec<Confound>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub centres: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub timezone: String,
    pub radius_km: f64,
    pub format: RecordFormat,
    pub seed: u64,
    pub output: PathBuf,
    pub permutations: u64,
    pub bootstraps: u64,
    pub max_lag: usize,
    pub seasons: Vec<SeasonWindow>,
    pub confounds: Vec<Confound>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            centres: None,
            lexicon: None,
            timezone: DEFAULT_TIMEZONE.to_string(),
            radius_km: moodcycle_core::geo::DEFAULT_RADIUS_KM,
            format: RecordFormat::Jsonl,
            seed: 0,
            output: PathBuf::from("."),
            permutations: DEFAULT_PERMUTATIONS,
            bootstraps: DEFAULT_BOOTSTRAPS,
            max_lag: DEFAULT_MAX_LAG,
            seasons: Vec::new(),
            confounds: Vec::new(),
        }
    }
}

fn resolve(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

fn valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn read(path: &Path) -> AppResult<String> {
    std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            usage(format!("{}: no such file", path.display()))
        } else {
            AppError::io(path)(e)
        }
    })
}

impl RunConfig {
    pub fn load(path: &Path) -> AppResult<Self> {
        let text = read(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base).map_err(|e| match e {
            AppError::Usage(m) => usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Parse and validate; relative paths resolve against `base`.
    pub fn from_toml(text: &str, base: &Path) -> AppResult<Self> {
        let file: RunFile = toml::from_str(text).map_err(|e| usage(e.to_string()))?;
        let defaults = RunConfig::default();
        let timezone = file.timezone.unwrap_or(defaults.timezone);
        parse_timezone(&timezone)?;
        let format = match file.format {
            Some(name) => RecordFormat::parse(&name).ok_or_else(|| usage(format!("unknown record format {name:?}")))?,
            None => defaults.format,
        };
        let mut seasons: Vec<SeasonWindow> = Vec::new();
        for s in file.season {
            if !valid_label(&s.label) {
                return Err(usage(format!("season label {:?} must be letters, digits, _ or -", s.label)));
            }
            let tz = parse_timezone(s.timezone.as_deref().unwrap_or(&timezone))?;
            let w = SeasonWindow::new(s.label, s.start, s.end, tz).map_err(|e| usage(e.to_string()))?;
            if let Some(other) = seasons.iter().find(|o| o.label() == w.label() || o.overlaps(&w)) {
                return Err(usage(format!("seasons {} and {} overlap or share a label", other.label(), w.label())));
            }
            seasons.push(w);
        }
        let config = RunConfig {
            centres: file.centres.map(|p| resolve(base, p)),
            lexicon: file.lexicon.map(|p| resolve(base, p)),
            timezone,
            radius_km: file.radius_km.unwrap_or(defaults.radius_km),
            format,
            seed: file.seed.unwrap_or(defaults.seed),
            output: file.output.map_or(defaults.output, |p| resolve(base, p)),
            permutations: file.permutations.unwrap_or(defaults.permutations),
            bootstraps: file.bootstraps.unwrap_or(defaults.bootstraps),
            max_lag: file.max_lag.unwrap_or(defaults.max_lag),
            seasons,
            confounds: file.confound,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> AppResult<()> {
        if !(self.radius_km.is_finite() && self.radius_km > 0.0) {
            return Err(usage(format!("radius_km must be positive, got {}", self.radius_km)));
        }
        for path in self.centres.iter().chain(&self.lexicon) {
            if !path.is_file() {
                return Err(usage(format!("{}: no such file", path.display())));
            }
        }
        for c in &self.confounds {
            if !(0.0..=1.0).contains(&c.threshold) {
                return Err(usage(format!("confound threshold {} outside [0, 1]", c.threshold)));
            }
        }
        Ok(())
    }

    pub fn require_centres(&self) -> AppResult<&Path> {
        self.centres
            .as_deref()
            .ok_or_else(|| usage("configuration names no centres file"))
    }

    pub fn require_lexicon(&self) -> AppResult<&Path> {
        self.lexicon
            .as_deref()
            .ok_or_else(|| usage("configuration names no lexicon file"))
    }

    pub fn require_seasons(&self) -> AppResult<&[SeasonWindow]> {
        if self.seasons.is_empty() {
            return Err(usage("configuration defines no [[season]] windows"));
        }
        Ok(&self.seasons)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoodEntry {
    name: String,
    terms: Vec<String>,
    baseline_rate: f64,
    #[serde(default)]
    amplitude: f64,
    #[serde(default)]
    phase_hour: f64,
    #[serde(default)]
    weekly_amplitude: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SynthFile {
    n_days: usize,
    #[serde(deserialize_with = "date")]
    start_date: NaiveDate,
    timezone: Option<String>,
    records_per_hour_mean: f64,
    tokens_per_record_mean: f64,
    vocabulary: Vec<String>,
    #[serde(default)]
    seed: u64,
    lat: Option<f64>,
    lon: Option<f64>,
    #[serde(rename = "mood")]
    moods: Vec<MoodEntry>,
}

/// Parse a synthesis file. Records are stamped at `lat`/`lon` when given,
/// else at `fallback`.
pub fn synth_from_toml(text: &str, fallback: Option<LatLon>) -> AppResult<SynthConfig> {
    let f: SynthFile = toml::from_str(text).map_err(|e| usage(e.to_string()))?;
    let location = match (f.lat, f.lon) {
        (Some(lat), Some(lon)) => LatLon::new(lat, lon).map_err(|e| usage(e.to_string()))?,
        (None, None) => fallback.ok_or_else(|| {
            usage("synthesis file has no lat/lon and no centres file is configured")
        })?,
        _ => return Err(usage("synthesis file must give both lat and lon")),
    };
    let config = SynthConfig {
        n_days: f.n_days,
        start_date: f.start_date,
        timezone: f.timezone.unwrap_or_else(|| DEFAULT_TIMEZONE.to_string()),
        location,
        records_per_hour_mean: f.records_per_hour_mean,
        tokens_per_record_mean: f.tokens_per_record_mean,
        vocabulary: f.vocabulary,
        moods: f
            .moods
            .into_iter()
            .map(|m| SynthMood {
                name: m.name,
                terms: m.terms,
                baseline_rate: m.baseline_rate,
                amplitude: m.amplitude,
                phase_hour: m.phase_hour,
                weekly_amplitude: m.weekly_amplitude,
            })
            .collect(),
        seed: f.seed,
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    Ok(config)
}
