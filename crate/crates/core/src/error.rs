use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a negative number")]
    NegativeSqrt,
    #[error("cannot parse number {0:?}")]
    Parse(String),
    #[error("transform length {0} is not a power of two between 2 and 2^28")]
    UnsupportedLength(usize),
    #[error("twiddle table built for {table} used with {input}")]
    TwiddleMismatch { table: String, input: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("operation graph contains a cycle")]
    CycleDetected,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
