use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("enumeration refused: n = {n} exceeds the cap of {cap} variables")]
    EnumerationCap { n: usize, cap: usize },

    #[error("invalid index {index} for width {width}")]
    IndexOutOfRange { index: usize, width: usize },

    #[error("duplicate index {0} within a single gate")]
    DuplicateIndex(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("width {width} exceeds the limit of {limit}")]
    WidthOverflow { width: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
