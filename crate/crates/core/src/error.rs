use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid batch: {0}")]
    InvalidBatch(String),

    #[error("empty selection: {0}")]
    EmptySelection(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid value: {0}")]
    Value(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("training diverged at epoch {epoch}: non-finite loss")]
    Divergence { epoch: usize },

    #[error("unlabeled pool is exhausted")]
    ExhaustedPool,

    #[error("strategy needs at least one labeled instance to seed from")]
    NeedsSeed,

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable name used in CLI error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidBatch(_) => "invalid_batch",
            Error::EmptySelection(_) => "empty_selection",
            Error::Parse { .. } => "parse",
            Error::Format(_) => "format",
            Error::Shape(_) => "shape",
            Error::Value(_) => "value",
            Error::Config(_) => "config",
            Error::Divergence { .. } => "divergence",
            Error::ExhaustedPool => "exhausted_pool",
            Error::NeedsSeed => "needs_seed",
            Error::UndefinedMetric(_) => "undefined_metric",
            Error::InsufficientData(_) => "insufficient_data",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
