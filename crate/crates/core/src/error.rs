use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid coordinates: lat {lat}, lon {lon}")]
    InvalidCoordinates { lat: f64, lon: f64 },

    #[error("invalid season window {label}: {reason}")]
    InvalidWindow { label: String, reason: String },

    #[error("unknown timezone {0:?}")]
    UnknownTimezone(String),

    #[error("unknown section header {0:?}")]
    UnknownSection(String),

    #[error("line {line}: word outside of any [mood] section")]
    WordOutsideSection { line: usize },

    #[error("series lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {needed} observations, found {found}")]
    TooFewObservations { needed: usize, found: usize },

    #[error("correlation undefined: constant input")]
    UndefinedCorrelation,

    #[error("no usable day pairs")]
    NoUsablePairs,

    #[error("unknown stem {0:?}")]
    UnknownStem(String),

    #[error("mood {0:?} has no active stems")]
    EmptyMood(String),

    #[error("mood {0:?} unmeasurable on this corpus")]
    Unmeasurable(String),

    #[error("invalid hour set {0:?}")]
    InvalidHourSet(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{discarded} of {requested} bootstrap draws had an undefined score")]
    TooManyDiscards { discarded: u64, requested: u64 },

    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),
}
