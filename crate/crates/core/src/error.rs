use thiserror::Error;

/// Errors raised by the library. Validation failures and estimator failures
/// are kept apart so front ends can map them to distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("metric table rejected: {0}")]
    InvalidMetric(String),

    #[error("size {size} exceeds the brute-force cap of {cap} points; gh_distance_small is exact only at desk scale")]
    TooLarge { size: usize, cap: usize },

    #[error("estimator failure: {0}")]
    Estimator(String),

    #[error("inconsistent curvature field: {0}")]
    InconsistentField(String),

    #[error("comparison triangle does not exist: {0}")]
    NoComparisonTriangle(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than a failing computation.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Estimator(_) | Error::Io(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
