use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unusable configuration or arguments (exit 2).
    #[error("config error: {0}")]
    Config(String),
    /// A numerical check did not hold (exit 1).
    #[error("check failed: {0}")]
    Check(String),
    #[error(transparent)]
    Engine(#[from] icf_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Check(_) | CliError::Engine(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
