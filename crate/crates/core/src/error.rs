use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("half-coordinates ({u}, {v}) are not an element of {ring}")]
    Parity { u: i64, v: i64, ring: String },

    #[error("integer overflow in ring arithmetic")]
    Overflow,

    #[error("operands live in different rings ({left} vs {right})")]
    MixedRings { left: String, right: String },

    #[error("determinant is not 1 (got {0})")]
    Determinant(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate row (norm {0:e}) in ANK decomposition")]
    DegenerateRow(f64),

    #[error("support size {size} exceeds budget {budget}")]
    SupportBudget { size: usize, budget: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
