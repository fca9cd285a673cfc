use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the range where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("size mismatch: {0}")]
    Size(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    /// Blocks and spikes of a synthetic signal could not be placed.
    #[error("placement failed: {0}")]
    Placement(String),

    #[error("bound is infeasible: {0}")]
    InfeasibleBound(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    /// No probe point with a stable mask/segment pattern was found.
    #[error("no screened point found: {0}")]
    ScreenedPointNotFound(String),

    #[error("training diverged: {0}")]
    Divergence(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn size(msg: impl Into<String>) -> Self {
        Error::Size(msg.into())
    }
}
