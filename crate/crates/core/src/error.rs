use thiserror::Error;

/// Errors raised by the engine.
///
/// The variants are grouped so that callers can tell bad input apart from a
/// violated theorem hypothesis and from an internal inconsistency.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("expansion has no solution: {0}")]
    NoSolution(String),

    #[error("expansion is not integral: {0}")]
    NonIntegral(String),

    #[error("expansion is not unique: {0}")]
    NotUnique(String),

    #[error("internal mismatch: {0}")]
    Mismatch(String),

    #[error("zero input where a nonzero value is required")]
    ZeroInput,

    #[error("cache i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
