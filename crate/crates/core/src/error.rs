use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ground set size {0} out of range (1..=16)")]
    GroundSetSize(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty family of bases")]
    EmptyFamily,
    #[error("face has dimension {found}, expected {expected}")]
    WrongDimension { expected: usize, found: usize },
    #[error("vertex set is not contained in the effective domain")]
    OutsideDomain,
    #[error("malformed linear system: {0}")]
    MalformedSystem(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field specifications differ")]
    SpecMismatch,
    #[error("invalid field specification: {0}")]
    InvalidSpec(String),
    #[error("element has negative valuation, residue undefined")]
    NegativeValuation,
    #[error("sign is only defined over the ordered field of rational functions with t-adic valuation")]
    Unordered,
    #[error("hensel precision cap of {0} digits exceeded")]
    PrecisionExceeded(usize),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("matrix is not {0}")]
    Structure(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
