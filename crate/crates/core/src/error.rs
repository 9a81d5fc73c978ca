use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid bit value {0} (bits must be 0 or 1)")]
    InvalidBit(u8),

    #[error("index {index} out of range for block length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("no primitive polynomial available for GF(2^{0})")]
    UnsupportedFieldDegree(u32),

    #[error("invalid code parameters: {0}")]
    InvalidCode(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("empty index set")]
    EmptySet,

    #[error("operation requires memory order {expected}, channel has {actual}")]
    MemoryOrder { expected: usize, actual: usize },

    #[error("burst subset is not a valid error pattern")]
    InvalidPattern,

    #[error("need at least {required} trials, got {actual}")]
    InsufficientTrials { required: usize, actual: usize },

    #[error("degenerate sample set: {0}")]
    Degenerate(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
