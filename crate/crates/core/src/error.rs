use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("history is empty")]
    EmptyHistory,

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("reward {0} is outside [0, 1]")]
    RewardOutOfRange(f64),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("coordinate descent exceeded its iteration budget of {budget} ascent steps")]
    IterationBudgetExceeded { budget: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
