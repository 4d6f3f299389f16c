use thiserror::Error;

/// Errors that stop a command before it can report. A check that runs and
/// fails is not an error; it exits with status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("input error: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] confuse_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NotFound(_) => 3,
            CliError::Input(_) | CliError::Core(_) => 4,
        }
    }
}
