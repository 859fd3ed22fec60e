use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("hilbert space dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("invalid factor dimension {0}: every factor needs dimension >= 2")]
    InvalidFactor(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{what} = {value} out of range ({allowed})")]
    OutOfRange {
        what: &'static str,
        value: String,
        allowed: String,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("matrix is not hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("state is not schmidt-diagonal in the computational basis")]
    NotSchmidtDiagonal,

    #[error("invalid generator {label}: {reason}")]
    InvalidGenerator { label: String, reason: String },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("basis {basis} does not support local dimension {dim}")]
    UnsupportedBasis { basis: &'static str, dim: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(
    what: &'static str,
    value: impl ToString,
    allowed: impl ToString,
) -> Error {
    Error::OutOfRange {
        what,
        value: value.to_string(),
        allowed: allowed.to_string(),
    }
}
