use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("value {value} outside alphabet 1..={size}")]
    Domain { value: u32, size: u32 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("not enough elements: requested {requested}, pool has {available}")]
    Insufficient { requested: usize, available: usize },

    #[error("structural protocol error: {0}")]
    Structural(String),

    #[error("invalid distribution: {0}")]
    Distribution(String),

    #[error("enumeration needs {atoms} atoms, cap is {cap}; try a smaller n or k")]
    Capacity { atoms: u128, cap: u128 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, actual: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }
}
