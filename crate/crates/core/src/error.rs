use thiserror::Error;

/// Errors raised by the scaffold library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two operands were built over different primes or different extensions.
    #[error("parameter mismatch: {0}")]
    Mismatch(String),

    /// A brute-force search or table would exceed the configured size bound.
    #[error("size limit exceeded: {0}")]
    TooLarge(String),

    /// An exact expression grew past the term-count cap.
    #[error("term limit exceeded: {terms} terms (limit {limit})")]
    TermLimit { terms: usize, limit: usize },

    /// Two independent computations of the same quantity disagreed.
    #[error("consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "not_prime",
            Error::Domain(_) => "domain",
            Error::Mismatch(_) => "mismatch",
            Error::TooLarge(_) => "too_large",
            Error::TermLimit { .. } => "term_limit",
            Error::Consistency(_) => "consistency",
        }
    }

    /// True for errors caused by bad input, as opposed to a failed internal check.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Consistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
