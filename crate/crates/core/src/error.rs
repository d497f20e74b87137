use alloc::string::String;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported dimension {0} (nets and vectors support n <= 3)")]
    UnsupportedDimension(usize),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("symbol {symbol} outside 1..={kappa}")]
    InvalidSymbol { symbol: u32, kappa: usize },
    #[error("coding too short: need {needed} symbols, have {available}")]
    CodingTooShort { needed: usize, available: usize },
    #[error("attractor bound is not invariant under map {0}")]
    BoundNotInvariant(usize),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
