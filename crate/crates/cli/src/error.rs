use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Core(#[from] qka::Error),

    #[error("missing input {path}: {hint}")]
    MissingInput { path: PathBuf, hint: String },

    #[error("{failed} of {total} grid points failed")]
    Incomplete { failed: usize, total: usize },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// Process exit code: 2 for configuration and file problems, 3 for
    /// numerical failures, 4 for an incomplete grid.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Json(_) | CliError::MissingInput { .. } | CliError::Io(_) | CliError::Csv(_) => 2,
            CliError::Core(qka::Error::InvalidModel(_) | qka::Error::InvalidArgument(_)) => 2,
            CliError::Incomplete { .. } => 4,
            _ => 3,
        }
    }
}
