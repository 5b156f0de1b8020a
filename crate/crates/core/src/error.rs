use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, got {got} ({context})")]
    Shape {
        expected: String,
        got: String,
        context: &'static str,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("bad IDX file {path}: {message}")]
    IdxFormat { path: PathBuf, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("training diverged: {0}")]
    Divergence(String),

    #[error("bad checkpoint {path}: {message}")]
    Checkpoint { path: PathBuf, message: String },

    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),

    #[error("bad config: {0}")]
    Config(String),
}

impl Error {
    pub fn shape(expected: impl Into<String>, got: impl Into<String>, context: &'static str) -> Self {
        Error::Shape {
            expected: expected.into(),
            got: got.into(),
            context,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
