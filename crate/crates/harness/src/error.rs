use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("write failed: {0}")]
    Write(#[from] std::io::Error),

    #[error("malformed checkpoint {path}: {source}")]
    Checkpoint {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] bhr_core::Error),

    #[error("solver returned a path that does not realize item {item_index} at p={p}")]
    Unsound { p: usize, item_index: u64 },

    #[error("starting state at p={p} could not be solved ({reason})")]
    StartUnsolvable { p: usize, reason: String },
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::StartUnsolvable { .. } | HarnessError::Unsound { .. } => 2,
            _ => 4,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
