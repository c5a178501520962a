use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("cannot parse ring spec {0:?}")]
    RingParse(String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("{0} does not divide {1}")]
    NotADivisor(u64, u64),
    #[error("operation requires a single modular ring, got {0}")]
    NotModular(String),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("basis index out of range: {0}")]
    BasisIndex(String),
    #[error("enumeration bound exceeded: {count} > {bound}")]
    EnumerationBound { count: u128, bound: u128 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("vector {0} is not in the orbit table")]
    NotInOrbit(String),
    #[error("coset enumeration overflow after {high_water} live cosets (limit {limit})")]
    Overflow { limit: usize, high_water: usize },
    #[error("coset table is incomplete")]
    IncompleteTable,
    #[error("level mismatch: {0}")]
    Level(String),
    #[error("no action formula covers {0}")]
    Uncovered(String),
    #[error("integer overflow in {0}")]
    IntegerOverflow(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
