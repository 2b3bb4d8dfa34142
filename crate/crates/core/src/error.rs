use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed {file}: {message}")]
    Malformed { file: String, message: String },

    #[error("non-finite sample at row {row}, column {column}")]
    NonFiniteSample { row: usize, column: usize },

    #[error("invalid event label {0} (expected 1 = task or 2 = rest)")]
    InvalidEventLabel(i64),

    #[error("event onset {onset} out of range for {n_samples} samples")]
    EventOutOfRange { onset: usize, n_samples: usize },

    #[error("events not strictly increasing at position {0}")]
    UnsortedEvents(usize),

    #[error("no segments produced")]
    NoSegments,

    #[error("channel count mismatch: expected {expected}, found {found}")]
    ChannelCountMismatch { expected: usize, found: usize },

    #[error("sampling rate mismatch: expected {expected} Hz, found {found} Hz")]
    SamplingRateMismatch { expected: f64, found: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite input value")]
    NonFiniteInput,

    #[error("degenerate training set: {0}")]
    DegenerateTrainingSet(String),

    #[error("undefined correlation: zero-variance input")]
    UndefinedCorrelation,

    #[error("no qualifying channel pairs")]
    NoQualifyingPairs,

    #[error("missing subject id on feature vector {0}")]
    MissingSubjectId(usize),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn malformed(file: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Malformed {
            file: file.into(),
            message: msg.into(),
        }
    }

    /// True for failures of the numerics themselves rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_))
    }
}
