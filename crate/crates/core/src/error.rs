use thiserror::Error;

use crate::sgti::SchulzTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid rank: {0}")]
    InvalidRank(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The result would have no terms; a CTD cannot represent zero.
    #[error("operation produced the zero tensor")]
    ZeroTensor,

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("projection matrix is identically zero")]
    DegenerateProjection,

    #[error("ill-conditioned normal equations: {0}")]
    Conditioning(String),

    #[error("initial Schulz error {0} is not below 1")]
    DivergentInit(f64),

    #[error("separation rank {rank} exceeds the cap {cap}")]
    RankOverflow {
        rank: usize,
        cap: usize,
        trace: Box<SchulzTrace>,
    },
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
