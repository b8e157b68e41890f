use thiserror::Error;

/// Failure modes shared by the numeric and symbolic layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A model failed its load-time consistency checks.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// An input lies outside the domain a routine is defined on.
    #[error("out of domain: {0}")]
    OutOfDomain(String),

    /// An exact operation was asked to leave the closed class it works in,
    /// e.g. inverting a non-monomial or substituting an exponential into an
    /// exponent.
    #[error("symbolic contract violated: {0}")]
    Symbolic(String),

    /// Lookup by identifier failed.
    #[error("unknown id `{0}` (valid: {1})")]
    UnknownId(String, String),
}

pub type Result<T> = std::result::Result<T, Error>;
