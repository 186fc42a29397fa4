use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operation requires a non-empty partition")]
    EmptyPartition,

    #[error("partition parts must be positive")]
    ZeroPart,

    #[error("largest part is {got}, but this formula requires a largest part > 1")]
    LargestPartTooSmall { got: u64 },

    #[error("invalid range: lo={lo} must satisfy 1 <= lo <= hi={hi}")]
    BadRange { lo: u64, hi: u64 },

    #[error("argument {got} is below the domain minimum {min}")]
    BelowDomain { got: u64, min: u64 },

    #[error("{0} is not prime (and not 1)")]
    NotPrime(u64),

    #[error("sieve limit {limit} exhausted: the operation needs coverage up to {needed}")]
    SieveExhausted { limit: u64, needed: u64 },

    #[error("value outside the bijection's domain: {0}")]
    OutsideDomain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid sieve cache: {0}")]
    InvalidCache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
