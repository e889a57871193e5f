use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the proposal pipeline and its file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("ppm: {msg} (byte offset {offset})")]
    Ppm { offset: usize, msg: String },

    #[error("annotations line {line}: {msg}")]
    Annotation { line: usize, msg: String },

    #[error("model line {line}: {msg}")]
    Model { line: usize, msg: String },

    #[error("config: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("batch stream: {0}")]
    Stream(String),

    #[error("ground truth contains no objects")]
    NoGroundTruth,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than the environment.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Io { .. })
            || matches!(self, Error::Io { source, .. } if source.kind() == io::ErrorKind::NotFound)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
