use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FpError {
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("matrix is not Hermitian (relative defect {0:e})")]
    NotHermitian(f64),

    #[error("power iteration did not converge within {0} iterations")]
    NonConvergent(usize),

    #[error("bisection bracket not found within {0} doublings")]
    BisectionFailed(usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),

    #[error("degenerate trace: {0}")]
    DegenerateTrace(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = FpError> = std::result::Result<T, E>;
