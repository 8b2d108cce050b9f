use std::fmt;
use std::process::ExitCode;

/// Failures surfaced to the shell. Usage errors exit with 2 and numerical
/// failures with 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Numerical(_) => ExitCode::from(3),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<mmr_core::Error> for CliError {
    fn from(e: mmr_core::Error) -> Self {
        match e {
            mmr_core::Error::RuleFailure { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}
