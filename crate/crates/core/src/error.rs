use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("raised-cosine amplitude must lie in [0, 1), got {0}")]
    SignedDensity(f64),

    #[error("replica index overflow: {start} + {count} exceeds u64")]
    ReplicaOverflow { start: u64, count: u64 },

    #[error("counter overflow: index {index} does not fit the 32-bit {what} counter")]
    CounterOverflow { what: &'static str, index: usize },

    #[error("spectral parameter must have positive imaginary part, got {re}{im:+}i")]
    SpectralParameter { re: f64, im: f64 },

    #[error("eigensolver failed to converge (residual {residual:e})")]
    EigenNonConvergence { residual: f64 },

    #[error("linear solve residual {residual:e} exceeds tolerance {tolerance:e}")]
    SolverResidual { residual: f64, tolerance: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("enumeration budget exceeded: {states} states requested, cap is {cap}")]
    BudgetExceeded { states: u128, cap: u128 },

    #[error("integer overflow in exact arithmetic: {0}")]
    Overflow(String),

    #[error("solution record violates its defining equations: {0}")]
    InvalidSolution(String),

    #[error("malformed solution file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
