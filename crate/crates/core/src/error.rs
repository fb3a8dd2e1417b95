use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum BpqmError {
    #[error("parity-check matrix is rank deficient: rank {rank} < {rows} rows")]
    RankDeficient { rank: usize, rows: usize },
    #[error("malformed matrix: {0}")]
    Malformed(String),
    #[error("unknown built-in code `{0}` (expected code5, code6, code8 or code17)")]
    UnknownCode(String),
    #[error("Tanner graph is not a connected tree")]
    NotTree,
    #[error("bit index {index} out of range 1..={n}")]
    BitOutOfRange { index: usize, n: usize },
    #[error("{what} = {value} exceeds the limit {limit}")]
    Guard { what: &'static str, value: usize, limit: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("decode order is not an information set: {0}")]
    BadOrder(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, BpqmError>;

impl From<std::io::Error> for BpqmError {
    fn from(e: std::io::Error) -> Self {
        BpqmError::Io(e.to_string())
    }
}
