use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("accuracy target missed: {message} (estimate {estimate:.3e}, tolerance {tolerance:.3e})")]
    Accuracy {
        message: String,
        estimate: f64,
        tolerance: f64,
    },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("branch error: {0}")]
    Branch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("malformed data at byte {offset}: {message}")]
    Malformed { offset: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
