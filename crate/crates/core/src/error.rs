use thiserror::Error;

/// Errors produced by the estimators, transforms and simulation harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("sample size mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {required} observations, got {got}")]
    TooFewObservations { required: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("ragged matrix: row {row} has {got} entries, expected {expected}")]
    Ragged {
        row: usize,
        got: usize,
        expected: usize,
    },

    #[error("degenerate scale (MAD = 0) at median {median}")]
    DegenerateScale { median: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("moment condition fails: {0}")]
    MomentCondition(String),

    #[error("cannot parse '{value}' as a number at row {row}, column {col}")]
    Parse {
        row: usize,
        col: usize,
        value: String,
    },

    #[error("input contains no data rows")]
    EmptyInput,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for problems with the supplied data or files rather than with the
    /// requested computation.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::LengthMismatch { .. }
                | Error::TooFewObservations { .. }
                | Error::Ragged { .. }
                | Error::Parse { .. }
                | Error::EmptyInput
                | Error::Config(_)
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
