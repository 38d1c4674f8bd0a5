use thiserror::Error;

/// Errors produced by corpus loading, scoring, and assembly operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line count mismatch: {left} lines vs {right} lines")]
    LineCountMismatch { left: usize, right: usize },

    #[error("invalid UTF-8 on line {line}")]
    InvalidUtf8 { line: usize },

    #[error("bad record on line {line}: expected exactly one TAB")]
    BadRecord { line: usize },

    #[error("bad merge on line {line} of BPE model file")]
    BadModelLine { line: usize },

    #[error("unknown origin `{0}`: no tag configured")]
    UnknownOrigin(String),

    #[error("language mismatch: expected {expected}, found {found}")]
    LangMismatch { expected: String, found: String },

    #[error("reference side is empty")]
    EmptyReference,

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("aligned lists differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
