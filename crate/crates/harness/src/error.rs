use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("bad config: {0}")]
    Config(String),

    #[error("integrator divergence: {0}")]
    Divergence(demc_core::Error),

    #[error("initialization failed: {0}")]
    Initialization(String),

    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] demc_core::Error),
}

impl HarnessError {
    /// Process exit code: 2 bad config, 3 integrator divergence,
    /// 4 initialization failure, 5 inconsistent inputs, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Divergence(_) => 3,
            HarnessError::Initialization(_) => 4,
            HarnessError::Inconsistent(_) => 5,
            HarnessError::Io { .. } | HarnessError::Json(_) | HarnessError::Core(_) => 1,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
