//! Seasonal windows and hourly bin assignment in local civil time.

use alloc::format;
use alloc::string::{String, ToString};

use chrono::{DateTime, NaiveDate, Timelike, Utc};
use chrono_tz::Tz;

use crate::error::{Error, Result};
use crate::HOURS_PER_DAY;

/// Timezone used when a configuration does not name one.
pub const DEFAULT_TIMEZONE: &str = "Europe/London";

pub fn parse_timezone(name: &str) -> Result<Tz> {
    name.parse::<Tz>()
        .map_err(|_| Error::UnknownTimezone(name.to_string()))
}

/// An inclusive range of calendar dates, binned in the given zone.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonWindow {
    label: String,
    start: NaiveDate,
    end: NaiveDate,
    tz: Tz,
}

impl SeasonWindow {
    pub fn new(label: impl Into<String>, start: NaiveDate, end: NaiveDate, tz: Tz) -> Result<Self> {
        let label = label.into();
        if label.is_empty() {
            return Err(Error::InvalidWindow {
                label,
                reason: "empty label".into(),
            });
        }
        let days = (end - start).num_days() + 1;
        if days < 2 {
            return Err(Error::InvalidWindow {
                label,
                reason: format!("window spans {days} day(s); at least 2 required"),
            });
        }
        Ok(SeasonWindow {
            label,
            start,
            end,
            tz,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn end(&self) -> NaiveDate {
        self.end
    }

    pub fn timezone(&self) -> Tz {
        self.tz
    }

    pub fn n_days(&self) -> usize {
        ((self.end - self.start).num_days() + 1) as usize
    }

    pub fn n_bins(&self) -> usize {
        self.n_days() * HOURS_PER_DAY
    }

    /// `(day_index, hour)` of `t` in local time, or `None` outside the window.
    ///
    /// The UTC instant is converted straight to the zone, so DST gaps and
    /// repeats never need resolving: a spring-forward day simply has no
    /// observations in its skipped hour.
    pub fn locate(&self, t: DateTime<Utc>) -> Option<(usize, usize)> {
        let local = t.with_timezone(&self.tz);
        let date = local.date_naive();
        if date < self.start || date > self.end {
            return None;
        }
        let day = (date - self.start).num_days() as usize;
        Some((day, local.hour() as usize))
    }

    /// Whether two windows share a calendar date.
    pub fn overlaps(&self, other: &SeasonWindow) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinKey {
    pub season_label: String,
    pub day_index: usize,
    pub hour_of_day: usize,
}

impl BinKey {
    /// Row-major index into a `days x 24` layout.
    pub fn flat_index(&self) -> usize {
        self.day_index * HOURS_PER_DAY + self.hour_of_day
    }
}

/// Assign `t` to its hourly bin in `w`; `None` means outside the window.
pub fn assign_bin(t: DateTime<Utc>, w: &SeasonWindow) -> Option<BinKey> {
    w.locate(t).map(|(day_index, hour_of_day)| BinKey {
        season_label: w.label.clone(),
        day_index,
        hour_of_day,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn utc(s: &str) -> DateTime<Utc> {
        DateTime::parse_from_rfc3339(s).unwrap().with_timezone(&Utc)
    }

    fn winter() -> SeasonWindow {
        let tz = parse_timezone("Europe/London").unwrap();
        SeasonWindow::new("winter2010", date(2010, 12, 6), date(2011, 2, 28), tz).unwrap()
    }

    fn summer() -> SeasonWindow {
        let tz = parse_timezone("Europe/London").unwrap();
        SeasonWindow::new("summer2011", date(2011, 6, 6), date(2011, 8, 28), tz).unwrap()
    }

    #[test]
    fn winter_first_bin() {
        let key = assign_bin(utc("2010-12-06T00:30:00Z"), &winter()).unwrap();
        assert_eq!(
            key,
            BinKey {
                season_label: "winter2010".into(),
                day_index: 0,
                hour_of_day: 0
            }
        );
    }

    #[test]
    fn summer_is_one_hour_ahead() {
        // BST = UTC+1 on 2011-06-06
        let key = assign_bin(utc("2011-06-06T08:30:00Z"), &summer()).unwrap();
        assert_eq!((key.day_index, key.hour_of_day), (0, 9));
        // 23:30Z on the last day is already the next local day
        assert_eq!(assign_bin(utc("2011-08-28T23:30:00Z"), &summer()), None);
        assert_eq!(
            summer().locate(utc("2011-08-28T22:59:59Z")),
            Some((83, 23))
        );
    }

    #[test]
    fn outside_window() {
        assert_eq!(assign_bin(utc("2011-09-01T00:00:00Z"), &summer()), None);
        assert_eq!(assign_bin(utc("2010-12-05T23:59:59Z"), &winter()), None);
    }

    #[test]
    fn window_day_counts() {
        // the winter dates as written span 85 calendar days, the summer ones 84
        assert_eq!(winter().n_days(), 85);
        assert_eq!(summer().n_days(), 84);
    }

    #[test]
    fn rejects_short_windows() {
        let tz = parse_timezone("UTC").unwrap();
        assert!(SeasonWindow::new("x", date(2011, 1, 1), date(2011, 1, 1), tz).is_err());
        assert!(SeasonWindow::new("x", date(2011, 1, 2), date(2011, 1, 1), tz).is_err());
        assert!(SeasonWindow::new("x", date(2011, 1, 1), date(2011, 1, 2), tz).is_ok());
    }

    #[test]
    fn unknown_zone() {
        assert!(matches!(
            parse_timezone("Mars/Olympus"),
            Err(Error::UnknownTimezone(_))
        ));
    }

    #[test]
    fn every_hour_reachable() {
        let w = summer();
        let tz = w.timezone();
        let mut seen = alloc::vec![false; w.n_bins()];
        let start = tz
            .from_local_datetime(&w.start().and_hms_opt(0, 0, 0).unwrap())
            .single()
            .unwrap()
            .with_timezone(&Utc);
        for step in 0..(w.n_bins() as i64) {
            let t = start + chrono::Duration::minutes(30 + 60 * step);
            let (d, h) = w.locate(t).unwrap();
            seen[d * 24 + h] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}
