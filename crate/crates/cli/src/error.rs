use thiserror::Error;

/// Failures of the harness, split by the exit code they map to.
#[derive(Debug, Error)]
pub enum BenchError {
    /// Bad flags, configuration or suite names (exit code 2).
    #[error("usage: {0}")]
    Usage(String),
    /// A solver, scenario or property failure (exit code 1).
    #[error(transparent)]
    Solver(#[from] fracopt::FpError),
    #[error("{0}")]
    Failure(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            _ => 1,
        }
    }
}
