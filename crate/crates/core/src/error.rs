use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown direction: {0}")]
    UnknownDirection(String),

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("degree error: {0}")]
    Degree(String),

    #[error("argument count: expected {expected}, got {got}")]
    ArgumentCount { expected: usize, got: usize },

    #[error("invariant polynomial error: {0}")]
    Polynomial(String),

    #[error("gauge transformation is not invertible: {0}")]
    NonInvertible(String),

    #[error("unknown connection id `{0}`")]
    UnknownConnection(String),

    #[error("connection `{0}` is not flat")]
    NotFlat(String),

    #[error("simplex {0} is not relatively flat")]
    NotRelativelyFlat(String),

    #[error("chain is not a cycle")]
    NotACycle,

    #[error("boundary of a 0-dimensional chain is undefined")]
    ZeroDimensionalBoundary,

    #[error("face map is not strictly increasing into [0, {target}]: {map:?}")]
    InvalidFaceMap { map: Vec<usize>, target: usize },

    #[error("unsupported fiber: {0}")]
    UnsupportedFiber(String),

    #[error("invalid offset {0}: offsets must be multiples of 1/4 in [0, 1)")]
    InvalidOffset(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    #[error("p = {p} with r = {r} gives no invariant; pass --allow-noninvariant to compute anyway")]
    NonInvariant { p: usize, r: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    /// Process exit status for a command that stopped with this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::NonInvariant { .. } => 4,
            Error::Io(_) => 2,
            _ => 3,
        }
    }

    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}
