use std::path::PathBuf;

use thiserror::Error;

/// Failures seen by the CLI and the service on top of library errors.
#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] mxv_core::Error),
    #[error("document is {found} data; this operation needs {expected}")]
    WrongKind { expected: &'static str, found: &'static str },
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
}

impl AppError {
    pub fn name(&self) -> &'static str {
        match self {
            AppError::Core(e) => e.name(),
            AppError::WrongKind { .. } => "WrongKind",
            AppError::Usage(_) => "Usage",
            AppError::Read { .. } => "ReadError",
            AppError::Write { .. } => "WriteError",
        }
    }

    pub fn is_usage(&self) -> bool {
        match self {
            AppError::Core(e) => e.is_usage(),
            AppError::Usage(_) => true,
            _ => false,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
