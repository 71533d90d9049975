//! Crate-wide error type.

/// Errors reported by grid construction, transport, statistics, and the
/// simulation harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A generating vector, grid specification, or other configuration value
    /// violates a documented precondition.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Input data is malformed (wrong shape, empty group, out-of-range
    /// label, non-finite value, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A statistic is undefined on the given data (for example zero pooled
    /// variance), and redraws did not help.
    #[error("degenerate data: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}
