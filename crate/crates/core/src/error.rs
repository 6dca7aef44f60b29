//! Crate-wide error type.

use crate::rational::Rational;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("variable tables differ: [{0}] vs [{1}]")]
    VarTableMismatch(String, String),

    #[error("variable `{0}` not present in the target variable table")]
    UnknownVariable(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular linear system; kernel witness attached")]
    SingularSystem { kernel: Vec<Rational> },

    #[error("parameter `{0}` must be nonzero")]
    ZeroParameter(&'static str),

    #[error("negative power of zero is undefined")]
    ZeroToNegativePower,

    #[error("bases must be pairwise distinct (bases {0} and {1} coincide)")]
    DuplicateBase(usize, usize),

    #[error("polynomial does not vanish at the division point (remainder {0})")]
    NonzeroRemainder(Rational),

    #[error("slot index {got} out of range (valid: {valid})")]
    SlotOutOfRange { got: usize, valid: String },

    #[error("element has mixed exponents in slot {slot}: the operation needs a single common value")]
    MixedSlotExponent { slot: usize },

    #[error("operation is undefined on the zero element")]
    ZeroElement,

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("element is not in the stated submodule: {0}")]
    NotInSubmodule(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("malformed module data: {0}")]
    BadModuleData(String),

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("JSON error: {0}")]
    Json(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
