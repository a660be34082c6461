//! Parse record files, keep records near an urban centre, and count their
//! stemmed tokens into per-season hourly matrices.
//!
//! Input is processed in fixed-size chunks in parallel. Every quantity
//! combined across chunks is an integer sum, so the result does not depend
//! on chunk scheduling or thread count.

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use moodcycle_core::geo::{nearest_centre_km, UrbanCentre};
use moodcycle_core::signal::TermFrequencyMatrix;
use moodcycle_core::textproc::{porter_stem, tokenize};
use moodcycle_core::window::SeasonWindow;
use moodcycle_core::TweetRecord;
use rayon::prelude::*;

use crate::error::{data, AppError, AppResult};
use crate::records::{parse_csv_records, parse_json_record, ParseError, RecordFormat};

const CHUNK: usize = 4096;

pub struct IngestSettings {
    pub centres: Vec<UrbanCentre>,
    pub radius_km: f64,
    pub windows: Vec<SeasonWindow>,
    /// Matrix columns.
    pub stems: BTreeSet<String>,
    pub format: RecordFormat,
}

/// Where every record read ended up. `binned + rejected() + outside_window`
/// always equals `read`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub read: u64,
    pub parsed: u64,
    pub parse_errors: u64,
    pub no_coordinates: u64,
    pub outside_radius: u64,
    pub geo_accepted: u64,
    pub outside_window: u64,
    pub binned: u64,
    pub tokens: u64,
    /// Records and tokens binned per season, in window order.
    pub per_season: Vec<(u64, u64)>,
}

impl IngestStats {
    pub fn rejected(&self) -> u64 {
        self.parse_errors + self.no_coordinates + self.outside_radius
    }

    fn add(&mut self, o: &IngestStats) {
        self.read += o.read;
        self.parsed += o.parsed;
        self.parse_errors += o.parse_errors;
        self.no_coordinates += o.no_coordinates;
        self.outside_radius += o.outside_radius;
        self.geo_accepted += o.geo_accepted;
        self.outside_window += o.outside_window;
        self.binned += o.binned;
        self.tokens += o.tokens;
        if self.per_season.len() < o.per_season.len() {
            self.per_season.resize(o.per_season.len(), (0, 0));
        }
        for (a, b) in self.per_season.iter_mut().zip(&o.per_season) {
            a.0 += b.0;
            a.1 += b.1;
        }
    }

    pub fn metrics(&self, windows: &[SeasonWindow]) -> Vec<(String, String)> {
        let mut m: Vec<(String, String)> = [
            ("read", self.read),
            ("parsed", self.parsed),
            ("parse_errors", self.parse_errors),
            ("no_coordinates", self.no_coordinates),
            ("outside_radius", self.outside_radius),
            ("geo_accepted", self.geo_accepted),
            ("outside_window", self.outside_window),
            ("rejected", self.rejected()),
            ("binned", self.binned),
            ("tokens", self.tokens),
        ]
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
        for (w, (records, tokens)) in windows.iter().zip(&self.per_season) {
            m.push((format!("binned_{}", w.label()), records.to_string()));
            m.push((format!("tokens_{}", w.label()), tokens.to_string()));
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileError {
    pub file: PathBuf,
    pub error: ParseError,
}

pub struct IngestOutput {
    pub matrices: Vec<TermFrequencyMatrix>,
    pub stats: IngestStats,
    pub errors: Vec<FileError>,
}

struct Partial {
    matrices: Vec<TermFrequencyMatrix>,
    stats: IngestStats,
    errors: Vec<ParseError>,
    /// token -> matrix column, if tracked
    cache: HashMap<String, Option<usize>>,
    hits: Vec<usize>,
}

impl Partial {
    fn new(s: &IngestSettings) -> Self {
        Partial {
            matrices: empty_matrices(s),
            stats: IngestStats {
                per_season: vec![(0, 0); s.windows.len()],
                ..IngestStats::default()
            },
            errors: Vec::new(),
            cache: HashMap::new(),
            hits: Vec::new(),
        }
    }

    fn merge(mut self, other: Partial) -> Self {
        for (a, b) in self.matrices.iter_mut().zip(&other.matrices) {
            a.merge(b).expect("same layout");
        }
        self.stats.add(&other.stats);
        self.errors.extend(other.errors);
        self
    }

    fn record(&mut self, s: &IngestSettings, parsed: Result<TweetRecord, ParseError>) {
        self.stats.read += 1;
        let r = match parsed {
            Ok(r) => r,
            Err(e) => {
                self.stats.parse_errors += 1;
                self.errors.push(e);
                return;
            }
        };
        self.stats.parsed += 1;
        let Some(loc) = r.location else {
            self.stats.no_coordinates += 1;
            return;
        };
        if nearest_centre_km(loc, &s.centres).is_none_or(|d| d > s.radius_km) {
            self.stats.outside_radius += 1;
            return;
        }
        self.stats.geo_accepted += 1;
        let Some((w, (day, hour))) = s
            .windows
            .iter()
            .enumerate()
            .find_map(|(i, w)| w.locate(r.timestamp).map(|bin| (i, bin)))
        else {
            self.stats.outside_window += 1;
            return;
        };

        self.hits.clear();
        let mut n_tokens = 0u64;
        for token in tokenize(&r.text) {
            n_tokens += 1;
            let column = match self.cache.get(token.as_str()) {
                Some(c) => *c,
                None => {
                    let stem = porter_stem(&token);
                    let c = self.matrices[0].stem_index(&stem);
                    self.cache.insert(token.into_string(), c);
                    c
                }
            };
            if let Some(c) = column {
                self.hits.push(c);
            }
        }
        self.matrices[w].add_resolved(day, hour, n_tokens, &self.hits);
        self.stats.binned += 1;
        self.stats.tokens += n_tokens;
        self.stats.per_season[w].0 += 1;
        self.stats.per_season[w].1 += n_tokens;
    }
}

fn empty_matrices(s: &IngestSettings) -> Vec<TermFrequencyMatrix> {
    s.windows
        .iter()
        .map(|w| TermFrequencyMatrix::new(w.label(), w.n_days(), s.stems.iter().cloned()))
        .collect()
}

/// Ingest the text of one record file.
fn ingest_text(text: &str, s: &IngestSettings) -> Result<Partial, ParseError> {
    let partial = match s.format {
        RecordFormat::Jsonl => {
            let lines: Vec<(usize, &str)> = text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .collect();
            lines
                .par_chunks(CHUNK)
                .fold(
                    || Partial::new(s),
                    |mut p, chunk| {
                        for &(i, line) in chunk {
                            p.record(s, parse_json_record(line, i + 1));
                        }
                        p
                    },
                )
                .reduce(|| Partial::new(s), Partial::merge)
        }
        RecordFormat::Csv => {
            let rows = parse_csv_records(text)?;
            rows.into_par_iter()
                .fold(
                    || Partial::new(s),
                    |mut p, row| {
                        p.record(s, row);
                        p
                    },
                )
                .reduce(|| Partial::new(s), Partial::merge)
        }
    };
    Ok(partial)
}

/// Ingest every file in turn. A file where more than half the records fail
/// to parse aborts the run, as does ending up with nothing binned.
pub fn ingest_files(paths: &[PathBuf], s: &IngestSettings) -> AppResult<IngestOutput> {
    let mut matrices = empty_matrices(s);
    let mut stats = IngestStats {
        per_season: vec![(0, 0); s.windows.len()],
        ..IngestStats::default()
    };
    let mut errors = Vec::new();
    for path in paths {
        let text = std::fs::read_to_string(path).map_err(AppError::io(path))?;
        let mut p = ingest_text(&text, s).map_err(|e| data(format!("{}: {e}", path.display())))?;
        if p.stats.parse_errors * 2 > p.stats.read {
            return Err(data(format!(
                "{}: {} of {} records failed to parse (wrong --format?); first: {}",
                path.display(),
                p.stats.parse_errors,
                p.stats.read,
                p.errors.iter().min_by_key(|e| e.line).map_or(String::new(), |e| e.to_string())
            )));
        }
        p.errors.sort_by_key(|e| e.line);
        errors.extend(p.errors.into_iter().map(|error| FileError {
            file: path.clone(),
            error,
        }));
        for (a, b) in matrices.iter_mut().zip(&p.matrices) {
            a.merge(b).expect("same layout");
        }
        stats.add(&p.stats);
    }
    if stats.read == 0 {
        return Err(data("no records"));
    }
    if stats.binned == 0 {
        if stats.geo_accepted > 0 && stats.outside_window == stats.geo_accepted {
            return Err(data("no records in any window"));
        }
        return Err(data(format!(
            "no records binned ({} parse errors, {} without coordinates, {} outside the radius)",
            stats.parse_errors, stats.no_coordinates, stats.outside_radius
        )));
    }
    Ok(IngestOutput {
        matrices,
        stats,
        errors,
    })
}

pub fn stats_are_consistent(s: &IngestStats) -> bool {
    s.binned + s.rejected() + s.outside_window == s.read
}
