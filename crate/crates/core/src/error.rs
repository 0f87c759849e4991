use thiserror::Error;

/// Errors raised by the exact p-adic layer and everything built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid precision context: {0}")]
    InvalidContext(String),
    #[error("elements belong to different precision contexts")]
    ContextMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("exact division by pi^{k} failed: coefficient of pi^{index} is nonzero")]
    ExactDivisionFailure { k: usize, index: usize },
    #[error("congruence failure: {0}")]
    CongruenceFailure(String),
    #[error("fixed-point iteration did not converge: residual valuation stuck at {valuation} after {iterations} iterations")]
    NonConvergence { iterations: usize, valuation: u64 },
    #[error("filtration window of length {length} exceeds p-1 = {limit}")]
    WindowOverflow { length: i64, limit: i64 },
    #[error("degenerate case: {0}")]
    Degenerate(String),
    #[error("sequence is not exact: {0}")]
    NotExact(String),
    #[error("coefficient is not p-integral: {0}")]
    NotIntegral(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
}

pub type Result<T> = std::result::Result<T, Error>;
