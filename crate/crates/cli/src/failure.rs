use ensembleq_core::Error;

/// Everything that ends a run, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Input(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("internal: {0}")]
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(Error::NumericalFailure { .. }) | Failure::Internal(_) => 3,
            Failure::Core(Error::ResourceLimit(_)) => 4,
            Failure::Core(_) | Failure::Input(_) | Failure::Io(_) => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_table() {
        assert_eq!(Failure::Core(Error::InvalidInput("x".into())).exit_code(), 2);
        assert_eq!(Failure::Core(Error::PreconditionViolated("x".into())).exit_code(), 2);
        let numeric = Error::NumericalFailure {
            message: "x".into(),
            residual: 1.0,
        };
        assert_eq!(Failure::Core(numeric).exit_code(), 3);
        assert_eq!(Failure::Core(Error::ResourceLimit("x".into())).exit_code(), 4);
        assert_eq!(Failure::Input("x".into()).exit_code(), 2);
    }
}
