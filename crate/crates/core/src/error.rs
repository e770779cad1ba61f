use alloc::string::String;

/// Failure modes shared by every operation in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the operation's domain (zero vector, bad `k`, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A factorization or decomposition broke down.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// The request would exceed a hard size limit.
    #[error("resource limit: {0}")]
    Resource(String),
    /// A metric field lost positivity.
    #[error("metric degenerates at grid point {point} (min eigenvalue {margin:e})")]
    Degenerate { point: usize, margin: f64 },
    /// A hypothesis that must be certified numerically did not certify.
    #[error("precondition not certified: {0}")]
    Precondition(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn numeric(msg: impl Into<String>) -> Error {
    Error::Numeric(msg.into())
}
