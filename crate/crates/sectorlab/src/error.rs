use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero input is not allowed here")]
    ZeroInput,
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no root: -1 is not a square modulo {0}")]
    NoRoot(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("inadmissible pair: {0}")]
    Inadmissible(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("outside proposition hypotheses: {0}")]
    OutsideHypotheses(String),
    #[error("instance too large: estimated work {work} exceeds limit {limit}")]
    TooLarge { work: u128, limit: u128 },
    #[error("binned spectrum needs at least {required} bits to meet the target error (got {given})")]
    InsufficientBins { required: u32, given: u32 },
    #[error("separation test stayed indeterminate after {0} widenings")]
    Indeterminate(u32),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
