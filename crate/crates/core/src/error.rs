use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("malformed JSON at line {line}: {message}")]
    MalformedLine { line: usize, message: String },

    #[error("missing key {key} at line {line}")]
    MissingKey { line: usize, key: &'static str },

    #[error("duplicate sample id {id:?} at line {line}")]
    DuplicateId { line: usize, id: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("compression ratio undefined for sample {id:?}: summary has no tokens")]
    UndefinedRatio { id: String },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("embedding error: {0}")]
    Embedding(String),

    #[error("sample {id:?}: {source}")]
    Sample {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown {kind} {name:?} (known: {known})")]
    Unknown {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn for_sample(self, id: &str) -> Self {
        match self {
            e @ Error::Sample { .. } => e,
            e => Error::Sample {
                id: id.to_string(),
                source: Box::new(e),
            },
        }
    }

    /// True for errors that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        match self {
            Error::Invariant(_) => true,
            Error::Sample { source, .. } => source.is_internal(),
            _ => false,
        }
    }
}
