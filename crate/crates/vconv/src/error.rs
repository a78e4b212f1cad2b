//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VconvError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("unknown invariant form `{0}`")]
    UnknownForm(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("basis is not orthonormal (residual {0:.3e})")]
    NotOrthonormal(f64),

    #[error("tuple is not a Tasaki basis (residual {0:.3e})")]
    NotTasaki(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numerically singular linear system in {0}")]
    SingularSystem(&'static str),

    #[error("overflow guard violated: |y|*R = {0:.3} exceeds {1}")]
    OverflowGuard(f64, f64),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, VconvError>;
