use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A model or condition set violates a structural invariant.
    #[error("structural error: {0}")]
    Structural(String),

    /// A JSON document does not follow the model schema.
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    /// A raw data row cannot be mapped onto the condition space.
    #[error("ingestion error for attribute `{attribute}`: {message}")]
    Ingest { attribute: String, message: String },

    /// An operation was called with inputs violating its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The brute-force oracle was asked for a space larger than its limit.
    #[error("condition space of size {n} exceeds the enumeration limit {limit}")]
    Capacity { n: usize, limit: usize },

    /// An empty dataset or a degenerate split.
    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
