use thiserror::Error;

/// Errors reported by every structure in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index {index} out of range (bound {bound})")]
    OutOfRange { index: u64, bound: u64 },
    #[error("ordinal {ordinal} not found (count {count})")]
    NotFound { ordinal: u64, count: u64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),
    #[error("malformed serialized data: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(index: impl TryInto<u64>, bound: impl TryInto<u64>) -> Error {
    Error::OutOfRange {
        index: index.try_into().unwrap_or(u64::MAX),
        bound: bound.try_into().unwrap_or(u64::MAX),
    }
}

pub(crate) fn not_found(ordinal: impl TryInto<u64>, count: impl TryInto<u64>) -> Error {
    Error::NotFound {
        ordinal: ordinal.try_into().unwrap_or(u64::MAX),
        count: count.try_into().unwrap_or(u64::MAX),
    }
}
