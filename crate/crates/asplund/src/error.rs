//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong when building or transforming functions,
/// measures, and reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("improper function: {0}")]
    Improper(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature box truncates the integrand: {0}")]
    Truncation(String),

    #[error("atom at {location:?} lies outside the grid box of the integrand")]
    AtomOutsideGrid { location: Vec<f64> },

    #[error("unsupported boundary: {0}")]
    UnsupportedBoundary(String),

    #[error("measure has no atoms in the outer shells below the radius cap ({0})")]
    CompactSupport(String),

    #[error("first variation did not converge and did not trigger the divergence detector")]
    IndeterminateVariation,

    #[error("functional oracle evaluation failed: {0}")]
    OracleFailure(String),

    #[error("serialization: {0}")]
    Serialization(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
