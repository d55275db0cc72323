use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("variable lists differ: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("hbar exponent {0} is below -1")]
    HbarUnderflow(i32),

    #[error("weyl context mismatch")]
    ContextMismatch,

    #[error("form degree {degree} exceeds rank {rank}")]
    DegreeOverflow { degree: usize, rank: usize },

    #[error("operator order {order} exceeds cap {cap}")]
    OrderOverflow { order: usize, cap: usize },

    #[error("symplectic form is not constant in the chosen frame; re-frame to Darboux coordinates")]
    NotDarboux,

    #[error("matrix is not invertible at the origin")]
    NotInvertible,

    #[error("connection is not flat: first non-central curvature in degree {degree}")]
    NotFlat { degree: i32 },

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("unknown catalogue entry `{0}`")]
    UnknownCatalogue(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("cochain arity {expected} does not match {got} sections")]
    Arity { expected: usize, got: usize },

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
