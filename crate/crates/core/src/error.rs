use thiserror::Error;

/// Errors raised across the solver.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid structural setup: qubit counts, gate indices, layouts, splits.
    #[error("configuration error: {0}")]
    Config(String),
    /// A caller broke an operation's contract (length mismatch, missing field, ...).
    #[error("contract error: {0}")]
    Contract(String),
    /// An input outside the encodable range of a feature map.
    #[error("domain error: {0}")]
    Domain(String),
    /// Training produced a non-finite loss or gradient.
    #[error("non-finite {quantity} at epoch {epoch} (component: {component})")]
    NonFinite {
        quantity: &'static str,
        epoch: usize,
        component: String,
    },
    /// Command-line or config-file usage error.
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}

impl Error {
    /// Process exit status for the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) => 2,
            Error::Io { .. } => 3,
            _ => 1,
        }
    }
}
