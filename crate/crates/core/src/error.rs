use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("invalid triangulation: {reason} (offending simplices {offending:?})")]
    InvalidTriangulation { reason: String, offending: Vec<usize> },
    #[error("inconsistent coefficient maps: {0}")]
    CoefficientConsistency(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("page structure error: {0}")]
    Structure(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid_triangulation(reason: impl Into<String>, offending: Vec<usize>) -> Self {
        Error::InvalidTriangulation { reason: reason.into(), offending }
    }
}
