use std::path::PathBuf;

use thiserror::Error;

use crate::circuit::ParseError;

#[derive(Debug, Error)]
pub enum QseError {
    /// An argument violated an operation's domain (index out of range,
    /// mismatched configurations, non-finite input, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("instruction {index} (line {line}): {source}")]
    Execution {
        index: usize,
        line: usize,
        #[source]
        source: Box<QseError>,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type QseResult<T> = Result<T, QseError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> QseResult<T> {
    Err(QseError::Domain(msg.into()))
}

impl QseError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        QseError::Io { path: path.into(), source }
    }
}
