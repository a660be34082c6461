//! On-disk tables shared between pipeline stages.
//!
//! Every table starts with one comment line naming the tool version, the
//! table schema and the master seed, then a single CSV header row:
//!
//! ```text
//! # moodcycle 0.1.0 schema=series/1 seed=42
//! season,mood,day_index,hour,score
//! ```
//!
//! Missing values are written as `NA`. Numbers use the shortest decimal form
//! that reads back to the same `f64`.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use moodcycle_core::signal::{CircadianProfile, MoodScoreSeries, TermFrequencyMatrix};
use moodcycle_core::stats::{AcfPoint, TestReport};
use moodcycle_core::HOURS_PER_DAY;

use crate::error::{data, AppError, AppResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SCHEMA_VERSION: u32 = 1;
pub const NA: &str = "NA";

pub type TableWriter = csv::Writer<BufWriter<File>>;

pub fn header_line(schema: &str, seed: u64) -> String {
    format!("# moodcycle {VERSION} schema={schema}/{SCHEMA_VERSION} seed={seed}")
}

pub fn create_table(path: &Path, schema: &str, seed: u64, columns: &[&str]) -> AppResult<TableWriter> {
    let file = File::create(path).map_err(AppError::io(path))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{}", header_line(schema, seed)).map_err(AppError::io(path))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns).map_err(|e| csv_error(path, e))?;
    Ok(w)
}

pub fn finish(path: &Path, mut w: TableWriter) -> AppResult<()> {
    w.flush().map_err(AppError::io(path))
}

fn csv_error(path: &Path, e: csv::Error) -> AppError {
    data(format!("{}: {e}", path.display()))
}

pub fn num(v: f64) -> String {
    if v.is_nan() {
        NA.to_string()
    } else {
        v.to_string()
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), num)
}

fn write_row<I, S>(path: &Path, w: &mut TableWriter, row: I) -> AppResult<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    w.write_record(row).map_err(|e| csv_error(path, e))
}

/// A table read back: its header comment fields, column names and rows.
pub struct Table {
    pub path: PathBuf,
    pub seed: u64,
    pub columns: Vec<String>,
    pub rows: Vec<csv::StringRecord>,
}

impl Table {
    pub fn column(&self, name: &str) -> AppResult<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| data(format!("{}: no column {name:?}", self.path.display())))
    }

    pub fn bad(&self, row: usize, what: &str) -> AppError {
        data(format!("{}: data row {}: {what}", self.path.display(), row + 1))
    }
}

pub fn read_table(path: &Path, schema: &str) -> AppResult<Table> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            data(format!("{}: not found; run the earlier stage first", path.display()))
        } else {
            AppError::io(path)(e)
        }
    })?;
    let first = text.lines().next().unwrap_or("");
    let mut fields = first.split_whitespace();
    let tagged = fields.next() == Some("#") && fields.next() == Some("moodcycle");
    let rest: Vec<&str> = fields.skip(1).collect();
    let want = format!("schema={schema}/{SCHEMA_VERSION}");
    if !tagged || !rest.contains(&want.as_str()) {
        return Err(data(format!("{}: not a {schema} table (expected {want})", path.display())));
    }
    let seed = rest
        .iter()
        .find_map(|f| f.strip_prefix("seed="))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| data(format!("{}: header comment lacks a seed", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let columns = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let rows = reader
        .records()
        .collect::<Result<_, _>>()
        .map_err(|e| csv_error(path, e))?;
    Ok(Table {
        path: path.to_path_buf(),
        seed,
        columns,
        rows,
    })
}

fn parse_opt(s: &str) -> Option<Option<f64>> {
    if s == NA {
        Some(None)
    } else {
        s.parse().ok().map(Some)
    }
}

// --- matrix ---------------------------------------------------------------

pub fn matrix_path(dir: &Path, season: &str) -> PathBuf {
    dir.join(format!("matrix_{season}.csv"))
}

pub fn write_matrix(path: &Path, m: &TermFrequencyMatrix, seed: u64) -> AppResult<()> {
    let mut columns = vec!["season", "day_index", "hour", "total"];
    columns.extend(m.stems().iter().map(String::as_str));
    let mut w = create_table(path, "matrix", seed, &columns)?;
    for bin in 0..m.n_bins() {
        let mut row = vec![
            m.season_label().to_string(),
            (bin / HOURS_PER_DAY).to_string(),
            (bin % HOURS_PER_DAY).to_string(),
            m.total(bin).to_string(),
        ];
        row.extend(m.bin_counts(bin).iter().map(u64::to_string));
        write_row(path, &mut w, &row)?;
    }
    finish(path, w)
}

pub fn read_matrix(path: &Path) -> AppResult<TermFrequencyMatrix> {
    let t = read_table(path, "matrix")?;
    if t.columns.len() < 4 || t.columns[..4] != ["season", "day_index", "hour", "total"] {
        return Err(data(format!("{}: unexpected matrix columns", path.display())));
    }
    let stems: Vec<String> = t.columns[4..].to_vec();
    if t.rows.is_empty() || t.rows.len() % HOURS_PER_DAY != 0 {
        return Err(data(format!("{}: {} rows is not a whole number of days", path.display(), t.rows.len())));
    }
    let season = t.rows[0][0].to_string();
    let mut totals = Vec::with_capacity(t.rows.len());
    let mut counts = Vec::with_capacity(t.rows.len() * stems.len());
    for (i, row) in t.rows.iter().enumerate() {
        let int = |j: usize| row.get(j).and_then(|s| s.parse::<u64>().ok());
        if row.len() != t.columns.len()
            || row[0] != season
            || int(1) != Some((i / HOURS_PER_DAY) as u64)
            || int(2) != Some((i % HOURS_PER_DAY) as u64)
        {
            return Err(t.bad(i, "out of order or malformed"));
        }
        totals.push(int(3).ok_or_else(|| t.bad(i, "bad total"))?);
        for j in 4..row.len() {
            counts.push(int(j).ok_or_else(|| t.bad(i, "bad count"))?);
        }
    }
    let n_days = t.rows.len() / HOURS_PER_DAY;
    TermFrequencyMatrix::from_parts(&season, n_days, stems, counts, totals)
        .map_err(|e| data(format!("{}: {e}", path.display())))
}

// --- series and profiles ----------------------------------------------------

pub fn series_path(dir: &Path, mood: &str) -> PathBuf {
    dir.join(format!("series_{mood}.csv"))
}

pub fn profile_path(dir: &Path, mood: &str) -> PathBuf {
    dir.join(format!("profile_{mood}.csv"))
}

/// Write the seasonal series of one mood, seasons in the order given.
pub fn write_series(path: &Path, series: &[MoodScoreSeries], seed: u64) -> AppResult<()> {
    let mut w = create_table(path, "series", seed, &["season", "mood", "day_index", "hour", "score"])?;
    for s in series {
        for d in 0..s.n_days() {
            for h in 0..HOURS_PER_DAY {
                let row = [
                    s.season_label.clone(),
                    s.mood.clone(),
                    d.to_string(),
                    h.to_string(),
                    opt(s.value(d, h)),
                ];
                write_row(path, &mut w, &row)?;
            }
        }
    }
    finish(path, w)
}

/// Read series back, one per season in file order. Term bookkeeping is not
/// stored here, so `n_terms` is 0 and `term_flags` empty.
pub fn read_series(path: &Path) -> AppResult<Vec<MoodScoreSeries>> {
    let t = read_table(path, "series")?;
    let (season, mood, day, hour, score) = (
        t.column("season")?,
        t.column("mood")?,
        t.column("day_index")?,
        t.column("hour")?,
        t.column("score")?,
    );
    let mut out: Vec<MoodScoreSeries> = Vec::new();
    for (i, row) in t.rows.iter().enumerate() {
        let label = &row[season];
        if out.last().is_none_or(|s| s.season_label != label) {
            if out.iter().any(|s| s.season_label == label) {
                return Err(t.bad(i, "season rows are not contiguous"));
            }
            out.push(MoodScoreSeries {
                mood: row[mood].to_string(),
                season_label: label.to_string(),
                values: Vec::new(),
                n_terms: 0,
                term_flags: Vec::new(),
            });
        }
        let s = out.last_mut().expect("pushed above");
        let at = s.values.len();
        if row[mood] != s.mood
            || row[day].parse::<usize>().ok() != Some(at / HOURS_PER_DAY)
            || row[hour].parse::<usize>().ok() != Some(at % HOURS_PER_DAY)
        {
            return Err(t.bad(i, "out of order or mixed moods"));
        }
        s.values.push(parse_opt(&row[score]).ok_or_else(|| t.bad(i, "bad score"))?);
    }
    if out.is_empty() || out.iter().any(|s| s.values.len() % HOURS_PER_DAY != 0) {
        return Err(data(format!("{}: incomplete days", path.display())));
    }
    Ok(out)
}

pub fn write_profiles(path: &Path, profiles: &[CircadianProfile], seed: u64) -> AppResult<()> {
    let mut w = create_table(path, "profile", seed, &["mood", "scope", "hour", "mean", "sem", "n_obs"])?;
    for p in profiles {
        for h in 0..HOURS_PER_DAY {
            let row = [
                p.mood.clone(),
                p.scope.clone(),
                h.to_string(),
                opt(p.mean[h]),
                num(p.sem[h]),
                p.n_obs[h].to_string(),
            ];
            write_row(path, &mut w, &row)?;
        }
    }
    finish(path, w)
}

pub fn read_profiles(path: &Path) -> AppResult<Vec<CircadianProfile>> {
    let t = read_table(path, "profile")?;
    let (mood, scope, hour, mean, sem, n_obs) = (
        t.column("mood")?,
        t.column("scope")?,
        t.column("hour")?,
        t.column("mean")?,
        t.column("sem")?,
        t.column("n_obs")?,
    );
    if t.rows.is_empty() || t.rows.len() % HOURS_PER_DAY != 0 {
        return Err(data(format!("{}: expected 24 rows per scope", path.display())));
    }
    let mut out = Vec::new();
    for (k, block) in t.rows.chunks(HOURS_PER_DAY).enumerate() {
        let mut p = CircadianProfile {
            mood: block[0][mood].to_string(),
            scope: block[0][scope].to_string(),
            mean: [None; HOURS_PER_DAY],
            sem: [0.0; HOURS_PER_DAY],
            n_obs: [0; HOURS_PER_DAY],
        };
        for (h, row) in block.iter().enumerate() {
            let i = k * HOURS_PER_DAY + h;
            if row[scope] != p.scope || row[mood] != p.mood || row[hour].parse::<usize>().ok() != Some(h) {
                return Err(t.bad(i, "rows out of order"));
            }
            p.mean[h] = parse_opt(&row[mean]).ok_or_else(|| t.bad(i, "bad mean"))?;
            p.sem[h] = row[sem]
                .parse()
                .ok()
                .filter(|s: &f64| *s >= 0.0)
                .ok_or_else(|| t.bad(i, "bad sem"))?;
            p.n_obs[h] = row[n_obs].parse().map_err(|_| t.bad(i, "bad n_obs"))?;
        }
        out.push(p);
    }
    Ok(out)
}

// --- reports ----------------------------------------------------------------

pub fn report_stem(test: &str, mood: &str, scope: &str) -> String {
    format!("{test}_{mood}_{scope}")
}

pub fn params_field(r: &TestReport) -> String {
    let mut parts = vec![format!("exceedances={}", r.exceedances)];
    parts.extend(r.parameters.iter().map(|(k, v)| format!("{k}={v}")));
    parts.join(";")
}

pub fn write_report(path: &Path, r: &TestReport) -> AppResult<()> {
    let mut w = create_table(
        path,
        "report",
        r.seed,
        &["test", "mood", "scope", "statistic", "p_value", "iterations", "seed", "params"],
    )?;
    let row = [
        r.test.as_str().to_string(),
        r.mood.clone(),
        r.scope.clone(),
        opt(r.statistic),
        num(r.p_value()),
        r.iterations.to_string(),
        r.seed.to_string(),
        params_field(r),
    ];
    write_row(path, &mut w, &row)?;
    finish(path, w)
}

pub fn write_trace(path: &Path, r: &TestReport) -> AppResult<()> {
    let mut w = create_table(path, "trace", r.seed, &["iteration", "statistic_value"])?;
    for (i, v) in r.trace.iter().enumerate() {
        write_row(path, &mut w, [i.to_string(), num(*v)])?;
    }
    finish(path, w)
}

pub fn write_acf(path: &Path, mood: &str, scope: &str, points: &[AcfPoint], seed: u64) -> AppResult<()> {
    let mut w = create_table(path, "acf", seed, &["mood", "scope", "lag", "r", "bound", "n_effective"])?;
    for p in points {
        let row = [
            mood.to_string(),
            scope.to_string(),
            p.lag.to_string(),
            opt(p.r),
            opt(p.bound),
            p.n_effective.to_string(),
        ];
        write_row(path, &mut w, &row)?;
    }
    finish(path, w)
}

/// A two-column `metric,value` table.
pub fn write_metrics(path: &Path, schema: &str, seed: u64, metrics: &[(String, String)]) -> AppResult<()> {
    let mut w = create_table(path, schema, seed, &["metric", "value"])?;
    for (k, v) in metrics {
        write_row(path, &mut w, [k, v])?;
    }
    finish(path, w)
}

pub fn read_metrics(path: &Path, schema: &str) -> AppResult<Vec<(String, String)>> {
    let t = read_table(path, schema)?;
    Ok(t.rows.iter().map(|r| (r[0].to_string(), r[1].to_string())).collect())
}

/// Any table given as rows of already formatted fields.
pub fn write_rows(path: &Path, schema: &str, seed: u64, columns: &[&str], rows: &[Vec<String>]) -> AppResult<()> {
    let mut w = create_table(path, schema, seed, columns)?;
    for row in rows {
        write_row(path, &mut w, row)?;
    }
    finish(path, w)
}

// --- lock -------------------------------------------------------------------

pub const LOCK_FILE: &str = ".moodcycle.lock";

/// Exclusive claim on an output directory, released on drop.
#[derive(Debug)]
pub struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    pub fn acquire(dir: &Path) -> AppResult<Self> {
        std::fs::create_dir_all(dir).map_err(AppError::io(dir))?;
        let path = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(OutputLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(data(format!(
                "{} is in use by another run (delete {} if that run is gone)",
                dir.display(),
                path.display()
            ))),
            Err(e) => Err(AppError::io(&path)(e)),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}
