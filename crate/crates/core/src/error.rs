//! Error type shared by the whole crate.

use std::fmt;
use std::io;

/// Errors from matrix algebra, function construction, and counting.
#[derive(Debug)]
pub enum Error {
    /// Operand shapes do not line up; carries (rows, cols) of both sides.
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    /// A square-only operation was handed a rectangular matrix.
    NonSquare { rows: usize, cols: usize },
    /// Inversion failed; carries the rank that elimination reached.
    Singular { rank: usize },
    /// Fewer independent columns exist than were requested.
    RankDeficient { rank: usize, needed: usize },
    /// A row/column/selection index list is malformed.
    BadIndices(String),
    /// A point or polynomial does not match the expected arity.
    ArityMismatch { expected: usize, actual: usize },
    /// Arity outside the supported range or of the wrong parity.
    InvalidArity(String),
    /// Malformed truth-table hex string.
    BadHex(String),
    /// A numeric argument is outside its allowed range.
    OutOfRange(String),
    /// The function is not balanced where balance is required.
    NotBalanced { weight: u64, expected: u64 },
    /// The base function does not attain maximum algebraic immunity.
    NotMaxAi(String),
    /// Refused computation; the message carries a cost estimate.
    TooLarge(String),
    Checkpoint(String),
    Parse(String),
    Io(io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { left, right } => write!(
                f,
                "dimension mismatch: {}x{} against {}x{}",
                left.0, left.1, right.0, right.1
            ),
            Error::NonSquare { rows, cols } => {
                write!(f, "matrix is not square: {rows}x{cols}")
            }
            Error::Singular { rank } => {
                write!(f, "matrix is singular: rank reached {rank}")
            }
            Error::RankDeficient { rank, needed } => write!(
                f,
                "only {rank} independent columns available, {needed} requested"
            ),
            Error::BadIndices(msg) => write!(f, "bad indices: {msg}"),
            Error::ArityMismatch { expected, actual } => {
                write!(f, "arity mismatch: expected {expected}, got {actual}")
            }
            Error::InvalidArity(msg) => write!(f, "invalid arity: {msg}"),
            Error::BadHex(msg) => write!(f, "bad truth-table hex: {msg}"),
            Error::OutOfRange(msg) => write!(f, "out of range: {msg}"),
            Error::NotBalanced { weight, expected } => {
                write!(f, "function is not balanced: weight {weight}, expected {expected}")
            }
            Error::NotMaxAi(msg) => write!(f, "{msg}"),
            Error::TooLarge(msg) => write!(f, "refusing oversized computation: {msg}"),
            Error::Checkpoint(msg) => write!(f, "checkpoint: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::Io(e)
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
