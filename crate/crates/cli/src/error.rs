use thiserror::Error;

/// Failures of the command-line driver, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Numerical(tdde::Error),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
            CliError::Validation(_) => 4,
        }
    }
}

impl From<tdde::Error> for CliError {
    fn from(e: tdde::Error) -> Self {
        match e {
            tdde::Error::Config(m) | tdde::Error::Parameter(m) => CliError::Config(m),
            e @ tdde::Error::OutOfRange { .. } => CliError::Config(e.to_string()),
            e => CliError::Numerical(e),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}
