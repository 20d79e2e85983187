use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A value violated the algebraic constraint of its type (non-pure input
    /// to a vec map, non-unit rotation axis, ...).
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time {t} s is outside the signal horizon [0, {horizon}] s")]
    OutsideHorizon { t: f64, horizon: f64 },

    #[error("non-finite control input at t = {t} s (step {step})")]
    NonFiniteControl { t: f64, step: usize },

    #[error("unknown controller kind `{0}`")]
    UnknownController(String),

    #[error("{path}:{line}: {message}")]
    Config { path: String, line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("inverse kinematics did not converge (residual {residual:.3e})")]
    IkDidNotConverge { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
