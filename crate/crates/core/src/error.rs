use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("numerical failure: {message} (residual {residual:.3e})")]
    NumericalFailure { message: String, residual: f64 },

    #[error("resource limit: {0}")]
    ResourceLimit(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::PreconditionViolated(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>, residual: f64) -> Self {
        Error::NumericalFailure {
            message: msg.into(),
            residual,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
