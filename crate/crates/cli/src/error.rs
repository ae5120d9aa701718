use std::io;
use std::path::PathBuf;

use exception_sieve_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("corrupt cache {path}: {reason}")]
    CorruptCache { path: PathBuf, reason: String },
    #[error("output encoding failed: {0}")]
    Encode(String),
}

impl CliError {
    /// 2 usage or domain, 3 capacity, 4 I/O or cache corruption.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_capacity() => 3,
            CliError::Core(_) => 2,
            CliError::Io { .. } | CliError::CorruptCache { .. } | CliError::Encode(_) => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
