use alloc::string::String;
use chrono::{DateTime, Utc};

use crate::geo::LatLon;

/// One ingested message.
#[derive(Debug, Clone, PartialEq)]
pub struct TweetRecord {
    pub id: String,
    pub timestamp: DateTime<Utc>,
    /// Both coordinates or neither.
    pub location: Option<LatLon>,
    pub text: String,
}

impl TweetRecord {
    pub fn new(
        id: impl Into<String>,
        timestamp: DateTime<Utc>,
        location: Option<LatLon>,
        text: impl Into<String>,
    ) -> Self {
        TweetRecord {
            id: id.into(),
            timestamp,
            location,
            text: text.into(),
        }
    }
}
