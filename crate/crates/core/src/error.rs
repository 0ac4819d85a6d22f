use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The eigensolver did not return a usable decomposition.
    #[error("eigensolver failed: {0}")]
    Eigen(String),

    /// A numerical invariant that cannot fail for valid input was violated.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
