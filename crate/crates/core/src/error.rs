use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix of {rows}x{cols} exceeds the addressable size")]
    Size { rows: usize, cols: usize },

    #[error("structural mismatch: {0}")]
    Structural(String),

    #[error("not a dagger idempotent: {0}")]
    NotAnIdempotent(String),

    #[error("non-invertible input: {0}")]
    NonInvertible(String),

    #[error("instance mismatch: {0}")]
    InstanceMismatch(String),

    #[error("degenerate dimension scalar {0:e}")]
    DegenerateDimension(f64),

    #[error("unsupported instance: {0}")]
    UnsupportedInstance(String),

    #[error("cocycle identity fails at triple {triple:?} (residual {residual:e})")]
    NotACocycle {
        triple: (usize, usize, usize),
        residual: f64,
    },

    #[error("object {0} is not a one-dimensional character")]
    NotACharacter(usize),

    #[error("not a unitary pseudonatural transformation: {0}")]
    NotUnitary(String),

    #[error("certification failed at {stage}: {detail}")]
    Certification { stage: String, detail: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn certification(stage: &str, detail: impl Into<String>) -> Self {
        Error::Certification {
            stage: stage.to_string(),
            detail: detail.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(format!("{e} (line {}, column {})", e.line(), e.column()))
    }
}
