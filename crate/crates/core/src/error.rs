use thiserror::Error;

/// Errors raised by the decision-problem, engine, and domain modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    Input(String),

    /// A rule or simulator produced an unusable decision on one replicate.
    #[error("rule `{rule}` failed on replicate {replicate}: {reason}")]
    RuleFailure {
        rule: String,
        replicate: u64,
        reason: String,
    },

    /// Exact enumeration was requested for a sample that is too large.
    #[error("exact enumeration refused: sample size {n} exceeds the limit of {limit}")]
    EnumerationTooLarge { n: usize, limit: usize },

    /// Reading a CSV input failed.
    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
