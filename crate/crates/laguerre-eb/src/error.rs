//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside domain: {0}")]
    OutOfDomain(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("empty data")]
    EmptyData,

    #[error("quadrature failed to converge: {0}")]
    QuadratureNonConvergent(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("marginal density vanishes near y = {y}")]
    NearZeroMarginal { y: f64 },

    #[error("estimator/model mismatch: {0}")]
    ModelMismatch(String),

    #[error("{failed} of {total} replications failed (limit is 10%)")]
    TooManyFailures { failed: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization: {0}")]
    Serialization(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad user input (parameters, domains,
    /// malformed files) as opposed to numerical breakdown.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::OutOfDomain(_)
                | Error::LengthMismatch { .. }
                | Error::EmptyData
                | Error::ModelMismatch(_)
                | Error::Serialization(_)
        )
    }
}
