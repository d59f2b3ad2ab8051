use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    /// A mathematical hypothesis required by the operation does not hold.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// The input is well-formed but lies outside the supported scope
    /// (for instance roots of degree greater than two).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A comparison could not be separated before the precision ceiling.
    #[error("indeterminate at {bits} bits: {what}")]
    Indeterminate { what: String, bits: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
