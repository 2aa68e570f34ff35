use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable count mismatch: {0} vs {1}")]
    VariableMismatch(usize, usize),
    #[error("arity mismatch: polynomial in {expected} variables evaluated at {got} values")]
    Arity { expected: usize, got: usize },
    #[error("division is not exact")]
    InexactDivision,
    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("unknown family or parameter: {0}")]
    Unknown(String),
    #[error("resource budget exceeded: {0}")]
    Budget(String),
    #[error("non-isolated solution set: {0}")]
    NonIsolated(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("genericity failure after {attempts} attempts: {msg}")]
    Genericity { attempts: usize, msg: String },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}
