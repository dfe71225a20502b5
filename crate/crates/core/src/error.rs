use thiserror::Error;

/// Errors produced by operator construction, basis building and dynamics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("integration failed at t = {time:.6e}: {reason}; try a smaller time step")]
    IntegrationFailure { time: f64, reason: String },

    #[error("rate estimation failed: {0}")]
    Estimation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
