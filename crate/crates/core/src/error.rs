use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields: {0}")]
    FieldMismatch(String),
    #[error("{0} is not prime")]
    CompositeModulus(u64),
    #[error("element is not integral (valuation {0} < 0)")]
    NotIntegral(String),
    #[error("singular matrix")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("operation requires a p-adic field")]
    RequiresPAdic,
    #[error("point is outside the supermodular cone S_2: x1 + x2 > x12")]
    OutsideCone,
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("index did not stabilize: {0} at modulus exponent M, {1} at M+1")]
    NotStabilized(u64, u64),
    #[error("malformed rational {0:?}")]
    MalformedRational(String),
    #[error("malformed term: {0}")]
    MalformedTerm(String),
    #[error("malformed lattice file: {0}")]
    MalformedFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
