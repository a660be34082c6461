//! Record files: one JSON object per line (default) or a CSV table with
//! the header `id,created_at,lat,lon,text`.

use std::borrow::Cow;
use std::fmt;
use std::io::Write;

use chrono::{DateTime, SecondsFormat, Utc};
use moodcycle_core::geo::LatLon;
use moodcycle_core::TweetRecord;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RecordFormat {
    #[default]
    Jsonl,
    Csv,
}

impl RecordFormat {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "jsonl" | "json" => Some(RecordFormat::Jsonl),
            "csv" => Some(RecordFormat::Csv),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RecordFormat::Jsonl => "jsonl",
            RecordFormat::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Id<'a> {
    #[serde(borrow)]
    Text(Cow<'a, str>),
    Number(serde_json::Number),
}

#[derive(Deserialize)]
struct JsonRecord<'a> {
    #[serde(borrow, default)]
    id: Option<Id<'a>>,
    #[serde(borrow, default)]
    created_at: Option<Cow<'a, str>>,
    #[serde(default)]
    lat: Option<f64>,
    #[serde(default)]
    lon: Option<f64>,
    #[serde(borrow, default)]
    text: Option<Cow<'a, str>>,
}

fn fail(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError {
        line,
        reason: reason.into(),
    }
}

fn parse_timestamp(text: &str, line: usize) -> Result<DateTime<Utc>, ParseError> {
    DateTime::parse_from_rfc3339(text.trim())
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| fail(line, format!("invalid timestamp {text:?}: {e}")))
}

fn location(lat: Option<f64>, lon: Option<f64>, line: usize) -> Result<Option<LatLon>, ParseError> {
    match (lat, lon) {
        (None, None) => Ok(None),
        (Some(lat), Some(lon)) => LatLon::new(lat, lon)
            .map(Some)
            .map_err(|_| fail(line, format!("invalid coordinates ({lat}, {lon})"))),
        _ => Err(fail(line, "incomplete coordinates")),
    }
}

/// Parse one JSON line. `line` is the 1-based line number used in errors.
pub fn parse_json_record(text: &str, line: usize) -> Result<TweetRecord, ParseError> {
    let raw: JsonRecord = serde_json::from_str(text).map_err(|e| fail(line, format!("malformed record: {e}")))?;
    let id = match raw.id {
        Some(Id::Text(s)) => s.into_owned(),
        Some(Id::Number(n)) => n.to_string(),
        None => return Err(fail(line, "missing id")),
    };
    let created_at = raw.created_at.ok_or_else(|| fail(line, "missing timestamp"))?;
    let timestamp = parse_timestamp(&created_at, line)?;
    let location = location(raw.lat, raw.lon, line)?;
    let text = raw.text.ok_or_else(|| fail(line, "missing text"))?;
    Ok(TweetRecord::new(id, timestamp, location, text.into_owned()))
}

/// Parse a whole CSV record file. Each entry carries the line its record
/// starts on.
pub fn parse_csv_records(text: &str) -> Result<Vec<Result<TweetRecord, ParseError>>, ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| fail(1, format!("unreadable header: {e}")))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| fail(1, format!("header lacks column {name:?}")))
    };
    let (id, created_at, lat, lon, body) = (
        column("id")?,
        column("created_at")?,
        column("lat")?,
        column("lon")?,
        column("text")?,
    );

    let mut out = Vec::new();
    let mut row = csv::StringRecord::new();
    loop {
        let line = reader.position().line() as usize;
        match reader.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                out.push(Err(fail(line, format!("malformed row: {e}"))));
                continue;
            }
        }
        let line = row.position().map_or(line, |p| p.line() as usize);
        let field = |i: usize| row.get(i).map(str::trim).filter(|s| !s.is_empty());
        let number = |i: usize, name: &str| -> Result<Option<f64>, ParseError> {
            field(i)
                .map(|s| s.parse::<f64>().map_err(|_| fail(line, format!("{name} {s:?} is not a number"))))
                .transpose()
        };
        let parsed = (|| {
            let id = field(id).ok_or_else(|| fail(line, "missing id"))?;
            let created_at = field(created_at).ok_or_else(|| fail(line, "missing timestamp"))?;
            let timestamp = parse_timestamp(created_at, line)?;
            let location = location(number(lat, "lat")?, number(lon, "lon")?, line)?;
            let text = row.get(body).ok_or_else(|| fail(line, "missing text"))?;
            Ok(TweetRecord::new(id, timestamp, location, text))
        })();
        out.push(parsed);
    }
    Ok(out)
}

#[derive(Serialize)]
struct JsonOut<'a> {
    id: &'a str,
    created_at: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    lat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lon: Option<f64>,
    text: &'a str,
}

/// Write one record as a JSON line.
pub fn write_json_record<W: Write>(out: &mut W, r: &TweetRecord) -> std::io::Result<()> {
    let rec = JsonOut {
        id: &r.id,
        created_at: r.timestamp.to_rfc3339_opts(SecondsFormat::AutoSi, true),
        lat: r.location.map(|l| l.lat()),
        lon: r.location.map(|l| l.lon()),
        text: &r.text,
    };
    serde_json::to_writer(&mut *out, &rec)?;
    out.write_all(b"\n")
}
