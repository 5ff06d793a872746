use thiserror::Error;

/// Crate-wide error type.
///
/// Variants are grouped by the CLI exit codes they map to: config errors
/// (exit 2), data errors (exit 3), compatibility errors (exit 4). Everything
/// else is an internal contract violation surfaced to the caller.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vocabulary error: {0}")]
    Vocab(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("value error: {0}")]
    Value(String),

    #[error("index error: {0}")]
    Index(String),

    #[error("config error: key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("compatibility error: {0}")]
    Compat(String),

    #[error("logic error: {0}")]
    Logic(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
