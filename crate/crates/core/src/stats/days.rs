use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::signal::MoodScoreSeries;
use crate::HOURS_PER_DAY;

/// One day's 24 hourly scores; `None` marks an empty bin.
pub type DayVector = [Option<f64>; HOURS_PER_DAY];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DayLabel {
    pub season: String,
    pub day_index: usize,
}

/// The days a test runs over, in order, with where each came from.
#[derive(Debug, Clone, PartialEq)]
pub struct DaySeriesSet {
    pub mood: String,
    /// Season label, or `aggregate` for pooled seasons.
    pub scope: String,
    pub days: Vec<DayVector>,
    pub labels: Vec<DayLabel>,
}

impl DaySeriesSet {
    /// Days labelled `(scope, 0..)`.
    pub fn new(mood: &str, scope: &str, days: Vec<DayVector>) -> Result<Self> {
        if days.is_empty() {
            return Err(Error::TooFewObservations { needed: 1, found: 0 });
        }
        let labels = (0..days.len())
            .map(|day_index| DayLabel {
                season: scope.to_string(),
                day_index,
            })
            .collect();
        Ok(DaySeriesSet {
            mood: mood.to_string(),
            scope: scope.to_string(),
            days,
            labels,
        })
    }

    /// Concatenate the days of one or more seasonal series of the same mood,
    /// in the order given.
    pub fn from_series(series: &[&MoodScoreSeries], scope: &str) -> Result<Self> {
        let first = series
            .first()
            .ok_or(Error::TooFewObservations { needed: 1, found: 0 })?;
        let mut days = Vec::new();
        let mut labels = Vec::new();
        for s in series {
            if s.mood != first.mood {
                return Err(Error::InvalidParameter(alloc::format!(
                    "cannot pool moods {} and {}",
                    first.mood,
                    s.mood
                )));
            }
            for d in 0..s.n_days() {
                days.push(s.day(d));
                labels.push(DayLabel {
                    season: s.season_label.clone(),
                    day_index: d,
                });
            }
        }
        if days.is_empty() {
            return Err(Error::TooFewObservations { needed: 1, found: 0 });
        }
        Ok(DaySeriesSet {
            mood: first.mood.clone(),
            scope: scope.to_string(),
            days,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    /// No hour of any day is missing.
    pub fn is_complete(&self) -> bool {
        self.days.iter().all(|d| d.iter().all(Option::is_some))
    }

    /// Day-ordered concatenation, 24 values per day.
    pub fn hourly_series(&self) -> Vec<Option<f64>> {
        self.days.iter().flat_map(|d| d.iter().copied()).collect()
    }
}
