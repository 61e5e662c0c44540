use thiserror::Error;

/// Errors returned by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The result is mathematically undefined for the given input.
    #[error("undefined input: {0}")]
    Undefined(String),

    /// A brute-force enumeration would exceed its configured size limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// The operation is not derived for this modulus kind.
    #[error("unsupported case: {0}")]
    Unsupported(String),

    /// Weight sequence or reduction indices are malformed.
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
}

pub type Result<T> = std::result::Result<T, Error>;
