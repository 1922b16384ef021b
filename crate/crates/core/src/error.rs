use thiserror::Error;

use crate::width::{IndexWidth, ScalarWidth};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} does not fit a {width} index")]
    IndexRangeExceeded {
        what: &'static str,
        value: u64,
        width: IndexWidth,
    },

    #[error("entry ({row}, {col}) lies outside a {nrows}x{ncols} matrix")]
    EntryOutOfBounds {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },

    #[error("bandwidth {bandwidth} exceeds the {width} offset range (max {})", width.max_value())]
    BandwidthExceedsIndexRange { bandwidth: u64, width: IndexWidth },

    #[error("matrix is not square ({nrows}x{ncols})")]
    NotSquare { nrows: usize, ncols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("no kernel for {0} scalars")]
    UnsupportedScalarWidth(ScalarWidth),

    #[error("invalid sparse structure: {0}")]
    InvalidStructure(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),

    #[error("{what} must be positive, got {value}")]
    NonPositiveInput { what: &'static str, value: f64 },

    #[error("invalid variant: {0}")]
    InvalidVariant(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }
}
