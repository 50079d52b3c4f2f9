use std::path::PathBuf;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONSISTENT: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_MONOTONICITY: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] mmi_core::Error),
    #[error("cannot read or write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{count} inconsistent instance(s) in suite {suite}")]
    Inconsistent { suite: String, count: usize },
    #[error("values decrease from {previous} to {value} at alpha {alpha}")]
    Monotonicity { alpha: String, previous: f64, value: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Inconsistent { .. } => EXIT_INCONSISTENT,
            CliError::Core(mmi_core::Error::SizeLimitExceeded { .. }) => EXIT_CAP,
            CliError::Monotonicity { .. } => EXIT_MONOTONICITY,
            _ => EXIT_INVALID,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
