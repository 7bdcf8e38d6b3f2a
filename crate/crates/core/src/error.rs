use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected length {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("numeric failure: {message} (residual {residual:e})")]
    Numeric { message: String, residual: f64 },

    #[error("frame has no atoms")]
    EmptyFrame,

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error(
        "not a frame: lower frame bound {lower_bound:e} does not exceed tolerance {tolerance:e}"
    )]
    NotAFrame { lower_bound: f64, tolerance: f64 },

    #[error("malformed {what}: {message}")]
    Parse { what: &'static str, message: String },

    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable code, used in `error.json`.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Dimension { .. } => "dimension-error",
            Error::Numeric { .. } => "numeric-error",
            Error::EmptyFrame => "empty-frame",
            Error::PreconditionViolation(_) => "precondition-violation",
            Error::NotAFrame { .. } => "not-a-frame",
            Error::Parse { .. } => "parse-error",
            Error::Io { .. } => "io-error",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(what: &'static str, msg: impl Into<String>) -> Self {
        Error::Parse {
            what,
            message: msg.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension { expected, found });
    }
    Ok(())
}
