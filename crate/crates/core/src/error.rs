use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QnsError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("times must be sorted in descending order, got {0:?}")]
    Ordering(Vec<f64>),

    #[error("order {order} is not supported here (supported: {supported})")]
    UnsupportedOrder { order: usize, supported: &'static str },

    #[error("expected {expected} pulses, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("pulse {index} axis is not unit norm (|n| = {norm})")]
    NonUnitAxis { index: usize, norm: f64 },

    #[error("observable is not invertible (det = {0:e})")]
    SingularObservable(f64),

    #[error("observable is not Hermitian (residue {0:e})")]
    NonHermitian(f64),

    #[error("density matrix is invalid: {0}")]
    InvalidState(String),

    #[error("spectra are missing key k={order}, n={windows:?}")]
    IncompleteSpectra { order: usize, windows: Vec<usize> },

    #[error("design matrix is rank deficient (condition number {condition:e})")]
    RankDeficient { condition: f64 },

    #[error("protocol design failed: pool of {pool} settings exhausted, best condition number {condition:e}")]
    DesignFailure { pool: usize, condition: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl QnsError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        QnsError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for QnsError {
    fn from(e: std::io::Error) -> Self {
        QnsError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, QnsError>;
