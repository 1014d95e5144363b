use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported quadrature scheme: {0}")]
    UnsupportedScheme(&'static str),

    #[error("wrong domain: expected {expected}")]
    WrongDomain { expected: &'static str },

    #[error("non-finite evaluation at {0:?}")]
    NonFinite(Vec<f64>),

    #[error("function is not 1-periodic in coordinate {0}")]
    NotPeriodic(usize),

    #[error("invalid metric space: {0}")]
    InvalidMetric(String),

    #[error("invalid modulus table: {0}")]
    InvalidModulus(String),

    #[error("Lipschitz constant K is infinite")]
    InfiniteLipschitz,

    #[error("enumeration of {count} subsets exceeds the guard of {limit}")]
    EnumerationGuard { count: u128, limit: u128 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("postcondition violated: {0}")]
    Postcondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
