//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid lottery or simulation configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A sample too small or too degenerate to carry the requested statistic.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// A selection that produced no observations at all.
    #[error("empty sample: {0}")]
    EmptySample(String),

    /// Malformed input data; `line` is 1-based and counts the header.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An iterative numerical routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
