use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] aptsim_core::Error),

    #[error("at t = {t}: {source}")]
    AtTime {
        t: f64,
        #[source]
        source: aptsim_core::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
}

impl CliError {
    /// 2 for invalid input, 3 for numerical failures, 1 for IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) | CliError::AtTime { source: e, .. } => {
                if e.is_validation() {
                    2
                } else {
                    3
                }
            }
            CliError::Usage(_) | CliError::Parse { .. } => 2,
            CliError::Io { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
