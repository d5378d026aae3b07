use thiserror::Error;

pub type Result<T> = std::result::Result<T, AramError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AramError {
    #[error("slow-memory index {index} out of bounds for array of length {len}")]
    OutOfBounds { index: usize, len: usize },

    #[error("{module}: fast memory exceeded (requested {requested} words, {in_use} of {capacity} in use)")]
    FastMemoryExceeded {
        module: &'static str,
        requested: usize,
        in_use: usize,
        capacity: usize,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("priority queue is empty")]
    EmptyHeap,

    #[error("contract violation: {0}")]
    Contract(String),
}
