use thiserror::Error;

/// Failures surfaced by the runner, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    pub fn io(context: impl std::fmt::Display, e: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {e}"))
    }
}

impl From<catastrophe_core::Error> for CliError {
    fn from(e: catastrophe_core::Error) -> Self {
        match e {
            catastrophe_core::Error::Config { field, reason } => CliError::Validation { field, reason },
            other if other.is_config() => CliError::Validation {
                field: "config".into(),
                reason: other.to_string(),
            },
            other => CliError::Numerical(other.to_string()),
        }
    }
}
