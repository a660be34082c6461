use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failure of a command, split by whether the invocation or the data was at
/// fault.
#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Core(#[from] moodcycle_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            _ => 2,
        }
    }

    pub fn io(path: &Path) -> impl FnOnce(io::Error) -> AppError + '_ {
        move |source| AppError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;

pub fn usage(msg: impl Into<String>) -> AppError {
    AppError::Usage(msg.into())
}

pub fn data(msg: impl Into<String>) -> AppError {
    AppError::Data(msg.into())
}
