use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Solver(#[from] kdv_utm::Error),
    /// A computation finished but did not meet its acceptance bar.
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Solver(kdv_utm::Error::ParameterDomain(_) | kdv_utm::Error::InvalidGrid(_)) => 2,
            _ => 1,
        }
    }
}
