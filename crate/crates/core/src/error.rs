use thiserror::Error;

/// Errors raised by the numeric core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Shape mismatch, out-of-range rank, non-finite entries and similar.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A factor-model specification that violates its own invariants.
    #[error("invalid factor model specification: {0}")]
    InvalidSpec(String),

    /// Truncation rank smaller than the number of requested directions.
    #[error("truncation rank s = {s} is smaller than k = {k}")]
    InvalidTruncation { s: usize, k: usize },

    /// A covariance with no usable positive variance.
    #[error("degenerate covariance: {0}")]
    DegenerateCovariance(String),

    /// An iterative eigenvalue kernel exceeded its iteration budget.
    #[error("eigenvalue iteration did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
