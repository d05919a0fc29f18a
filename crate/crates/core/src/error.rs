use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A query needed a coefficient at or below the known precision floor.
    #[error(
        "precision exhausted: needed coefficients at exponent {needed}, known only above {floor}"
    )]
    PrecisionExhausted { needed: i64, floor: i64 },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("invalid field specification: {0}")]
    InvalidField(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("singular basis")]
    SingularBasis,
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("unsatisfiable predicate {predicate}: {detail}")]
    UnsatisfiablePredicate { predicate: String, detail: String },
    #[error("cube at level {level} could not be certified")]
    UncertifiableCube { level: u64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("verification failed (epoch {epoch}, level {level}): {inequality}: {detail}")]
    Verification {
        epoch: usize,
        level: u64,
        inequality: String,
        detail: String,
    },
    #[error("value off the grid: {0}")]
    GridMisalignment(String),
    #[error("unsupported psi family: {0}")]
    UnsupportedFamily(String),
}

pub type Result<T> = std::result::Result<T, Error>;
