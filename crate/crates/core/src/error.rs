use thiserror::Error;

/// Errors raised by the library. Failed *checks* are never errors: they are
/// reported as data (verdicts, fail flags). Errors mean a computation could
/// not be carried out or its inputs were invalid.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed decimal literal {0:?}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A strict comparison could not be decided before the precision cap.
    #[error("unresolved comparison: {0}")]
    Unresolved(String),

    #[error("depth error: {0}")]
    Depth(String),

    #[error("budget exhausted: {0}")]
    Budget(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn unresolved(msg: impl Into<String>) -> Self {
        Error::Unresolved(msg.into())
    }

    pub(crate) fn depth(msg: impl Into<String>) -> Self {
        Error::Depth(msg.into())
    }

    pub(crate) fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for the error classes that the CLI maps to the
    /// "unresolved / budget" exit code.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::Unresolved(_) | Error::Budget(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
