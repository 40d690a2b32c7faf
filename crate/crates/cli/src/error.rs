use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or input files; exit status 2.
    #[error("{0}")]
    Usage(String),
    /// A check ran and failed; exit status 1.
    #[error("verification failed: {0}")]
    Verification(String),
    /// Anything that went wrong while running; exit status 3.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

