use thiserror::Error;

/// Errors produced by the workbench core.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A computation would exceed a configured resource budget.
    #[error("resource guard exceeded: {0}")]
    ResourceGuard(String),

    /// A result does not fit the requested integer range.
    #[error("out of range: {0}")]
    Range(String),

    /// A measure normalizer is too close to zero to divide by.
    #[error("degenerate measure: {0}")]
    Degenerate(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::ResourceGuard(msg.into())
    }

    pub fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}
