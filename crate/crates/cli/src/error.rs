use thiserror::Error;

/// Failure classes, each with its own process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Violation(_) => 1,
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<fischer_core::Error> for CliError {
    fn from(e: fischer_core::Error) -> Self {
        match e {
            fischer_core::Error::Parse(m) => CliError::Parse(m),
            e if e.is_numerical() => CliError::Numerical(e.to_string()),
            e => CliError::Precondition(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
