use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{value} is not divisible by {divisor}")]
    NotDivisible { value: u64, divisor: u64 },

    #[error("value {value} outside [1, {limit}]")]
    OutOfRange { value: u64, limit: u64 },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),

    #[error("invalid constants: {0}")]
    InvalidConstants(String),

    #[error("multi-set is not {0}-dense")]
    NotDense(String),

    #[error("target {t} outside certified window [{lo}, {hi}]")]
    OutsideWindow { t: u64, lo: u64, hi: u64 },

    #[error("multi-set is not uniform")]
    NotUniform,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
