use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid symbol {symbol:?} at position {position}")]
    InvalidSymbol { symbol: char, position: usize },

    #[error("configuration strings must be non-empty")]
    Empty,

    #[error("expected {expected} second class particle(s), found {found}")]
    SecondClassCount {
        expected: &'static str,
        found: usize,
    },

    #[error("density {0} outside the open interval (0, 1)")]
    DensityOutOfRange(f64),

    #[error("{what} = {value} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two independent computations of the same quantity disagreed.
    #[error("consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
