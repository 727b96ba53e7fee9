use thiserror::Error;

/// Errors raised by every layer of the library.
///
/// The CLI maps `Usage` and `Parse` to exit code 1, `Hypothesis` to 2 and the
/// numeric variants to 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NevError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("size limit exceeded: {0}")]
    Size(String),
    #[error("map lies in the hypersurface: {0}")]
    MapInHypersurface(String),
    #[error("degenerate line: {0}")]
    DegenerateLine(String),
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, NevError>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(NevError::Usage(msg.into()))
}
