use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::HOURS_PER_DAY;

/// A non-empty set of clock hours `0..=23`.
///
/// Parsed from a comma-separated list of items, each either a single hour
/// `h` or a half-open range `a-b` covering `a, a+1, .., b-1`. `b` may be 24,
/// and a range with `b < a` wraps past midnight: `22-2` is `{22, 23, 0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HourSet {
    mask: u32,
}

impl HourSet {
    pub fn from_hours<I: IntoIterator<Item = usize>>(hours: I) -> Result<Self> {
        let mut mask = 0u32;
        for h in hours {
            if h >= HOURS_PER_DAY {
                return Err(Error::InvalidHourSet(alloc::format!("hour {h}")));
            }
            mask |= 1 << h;
        }
        if mask == 0 {
            return Err(Error::InvalidHourSet("empty".to_string()));
        }
        Ok(HourSet { mask })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidHourSet(text.to_string());
        let number = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
        let mut hours = Vec::new();
        for item in text.split(',') {
            let item = item.trim();
            if item.is_empty() {
                return Err(bad());
            }
            match item.split_once('-') {
                None => {
                    let h = number(item)?;
                    if h >= HOURS_PER_DAY {
                        return Err(bad());
                    }
                    hours.push(h);
                }
                Some((a, b)) => {
                    let (a, b) = (number(a)?, number(b)?);
                    if a >= HOURS_PER_DAY || b > HOURS_PER_DAY || a == b {
                        return Err(bad());
                    }
                    if a < b {
                        hours.extend(a..b);
                    } else {
                        hours.extend(a..HOURS_PER_DAY);
                        hours.extend(0..b);
                    }
                }
            }
        }
        HourSet::from_hours(hours)
    }

    pub fn contains(&self, hour: usize) -> bool {
        hour < HOURS_PER_DAY && self.mask & (1 << hour) != 0
    }

    pub fn hours(&self) -> impl Iterator<Item = usize> + '_ {
        (0..HOURS_PER_DAY).filter(move |&h| self.contains(h))
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    /// Canonical listing, e.g. `2 3 4 20 21`.
    pub fn to_list(&self) -> String {
        let mut out = String::new();
        for h in self.hours() {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&h.to_string());
        }
        out
    }
}

impl fmt::Display for HourSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_list())
    }
}
