use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("invalid program: {0}")]
    Invalid(String),
    #[error("invalid distribution: {0}")]
    Distribution(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("combining rule: {0}")]
    Combine(String),
    #[error("cyclic dependency: {0}")]
    Cycle(String),
    #[error("program defines no RVs")]
    NoRvs,
    #[error("comparison on unbound value: {0}")]
    Unbound(String),
    #[error("non-exhaustive program: {0}")]
    NonExhaustive(String),
    #[error("assignment not closed: {0}")]
    NotClosed(String),
    #[error("oracle: {0}")]
    Oracle(String),
    #[error("evidence has probability zero")]
    ZeroEvidence,
    #[error("evidence never weighted positively")]
    ZeroWeight,
    #[error("unknown RV: {0}")]
    UnknownRv(String),
    #[error("invalid evidence: {0}")]
    Evidence(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("BIF error at {line}:{col}: {msg}")]
    Bif { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
