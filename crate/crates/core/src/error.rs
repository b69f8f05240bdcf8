use thiserror::Error;

/// Errors raised across the library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("point outside the open domain: {0}")]
    Domain(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("no convergence after {iterations} iterations (last residual {last:e})")]
    IterationLimit {
        iterations: usize,
        last: f64,
        history: Vec<f64>,
    },
    #[error("iteration diverged: {0}")]
    Divergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
