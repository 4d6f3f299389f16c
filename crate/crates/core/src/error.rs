use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("carrier size {size} exceeds the configured bound {bound}")]
    SizeBoundExceeded { size: u64, bound: u64 },
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{divisor} does not divide {value}")]
    NotADivisor { divisor: u64, value: u64 },
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("subgroup projection onto Z_{divisor} is not a uniform cover of a subgroup")]
    ProjectionViolation { divisor: u32 },
    #[error("invalid confusable structure: {0}")]
    InvalidStructure(String),
    #[error("invalid function table: {0}")]
    InvalidTable(String),
    #[error("input alphabet of size {alphabet} does not fit a carrier of size {carrier}")]
    AlphabetTooLarge { alphabet: usize, carrier: usize },
    #[error("invalid expansion: {0}")]
    InvalidExpansion(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("totality error: {0}")]
    Totality(String),
    #[error("scheme is not a field scheme")]
    NotAFieldScheme,
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("no candidate in the solution coset")]
    Undecodable,
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
}
