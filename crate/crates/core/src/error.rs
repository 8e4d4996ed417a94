use thiserror::Error;

/// Errors raised by construction, arithmetic and verification routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("{gamma} is not a primitive element of GF({p})")]
    NotPrimitive { gamma: u64, p: u32 },
    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operands live over different fields (GF({0}) vs GF({1}))")]
    FieldMismatch(u32, u32),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("generator matrix is not in standard form [1 | A]")]
    NotStandardForm,
    #[error("generator matrix does not define an MDS code")]
    NotMds,
    #[error("enumeration of {required} items exceeds the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
