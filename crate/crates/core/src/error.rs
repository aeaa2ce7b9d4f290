use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Location of a point inside a configuration file, using the input order
/// of the color classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointLocation {
    pub color: usize,
    pub index: usize,
}

impl std::fmt::Display for PointLocation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "colors[{}][{}]", self.color, self.index)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed scalar {text:?}: {reason}")]
    MalformedScalar { text: String, reason: String },

    #[error("malformed scalar at {location} coordinate {coord}: {reason}")]
    MalformedCoordinate {
        location: PointLocation,
        coord: usize,
        reason: String,
    },

    #[error("point at {location} has {found} coordinates, expected {expected}")]
    DimensionMismatch {
        location: PointLocation,
        expected: usize,
        found: usize,
    },

    #[error("vectors have mismatched lengths: expected {expected}, found {found}")]
    MismatchedVectors { expected: usize, found: usize },

    #[error("duplicate point: {second} repeats {first}")]
    DuplicatePoint {
        first: PointLocation,
        second: PointLocation,
    },

    #[error("color class {color} is empty")]
    EmptyClass { color: usize },

    #[error("configuration has no color classes")]
    NoColors,

    #[error("point at {location} has a non-real coordinate in a rational configuration")]
    NonRealCoordinate { location: PointLocation },

    #[error("invalid configuration file: {0}")]
    Format(String),

    #[error("partition indices out of range: need 0 <= x < y <= {n}, got x={x}, y={y}")]
    PartitionRange { x: usize, y: usize, n: usize },

    #[error("triple systems require r >= 3, got {0}")]
    TripleGround(usize),

    #[error("design parameter k is zero; the rank bound is undefined")]
    ZeroColumnSupport,

    #[error("operation requires exactly {expected} colors, configuration has {found}")]
    ColorCount { expected: usize, found: usize },

    #[error("sizes must be positive and nonincreasing: {0:?}")]
    InvalidSizes(Vec<usize>),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("hypothesis empty: measured delta* is zero, no admissible epsilon exists")]
    EmptyHypothesis,

    #[error("supplied delta {supplied} exceeds the measured delta* {measured}")]
    DeltaAboveMeasured { supplied: String, measured: String },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
