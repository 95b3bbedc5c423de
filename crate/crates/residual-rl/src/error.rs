//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix {name} is singular")]
    SingularMatrix { name: String },

    #[error("power iteration did not converge; chain may not be ergodic")]
    NonErgodic,

    #[error("residual-gradient update needs an independent second successor sample")]
    DoubleSampling,

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
