use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid dimensions must be positive, got {0:?}")]
    InvalidDims([usize; 3]),
    #[error("grid has {found} values but dims {dims:?} require {expected}")]
    DimsMismatch {
        dims: [usize; 3],
        expected: usize,
        found: usize,
    },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("field is constant (min == max == {0}); cannot normalize")]
    DegenerateRange(f64),
    #[error("level schedule is not monotone for {direction}: {detail}")]
    NonMonotoneSchedule { direction: &'static str, detail: String },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("occupied region of {cells} cubes exceeds the oracle limit of {limit}")]
    TooLarge { cells: usize, limit: usize },
    #[error("bodies are not nested at level {0}")]
    NotNested(usize),
    #[error("bodies have different dims")]
    DimsDisagree,
    #[error("chain complex inconsistent: {0}")]
    ChainInconsistency(String),
    #[error("chain map does not commute with the differentials: {0}")]
    CommutationFailure(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("gradient descent did not terminate within {0} steps")]
    NonTermination(usize),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
