use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or transformation diverges for the requested arguments.
    #[error("series does not converge: {0}")]
    NonConvergence(String),

    /// The request is well formed but not supported (e.g. fractional cluster
    /// counts for the physical sampler).
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("empty sample")]
    EmptySample,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
