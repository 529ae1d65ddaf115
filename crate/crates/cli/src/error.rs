//! Command-level errors mapped to stable exit codes.

use std::path::PathBuf;

use thiserror::Error;

/// Exit code 2: an input could not be read or parsed.
/// Exit code 3: detections reference images missing from the ground truth.
/// Exit code 4: tensors with incompatible dimensions.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{0}")]
    ImageIdMismatch(String),

    #[error("{0}")]
    DimensionMismatch(String),

    #[error("{path}: {source}")]
    OutputIo {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => 2,
            CliError::ImageIdMismatch(_) => 3,
            CliError::DimensionMismatch(_) => 4,
            CliError::OutputIo { .. } => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
