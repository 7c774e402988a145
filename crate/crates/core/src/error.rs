use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("length error: expected {expected} bytes, found {found}")]
    Length { expected: usize, found: usize },

    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("parse error on line {line}: {message}")]
    ModelParse { line: usize, message: String },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("incomplete feature range: missing indices {0:?}")]
    IncompleteRange(Vec<usize>),

    #[error("incomplete group {label}: {missing} missing (image, condition) pairs, first: {first}")]
    IncompleteGroup {
        label: String,
        missing: usize,
        first: String,
    },

    #[error("unsupported bit depth in {0}: only 8-bit gray or RGB is accepted")]
    UnsupportedDepth(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
