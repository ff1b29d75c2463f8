use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("generator column {column} is zero; drop it before building the lifted system")]
    ZeroGeneratorColumn { column: usize },

    #[error("generator column {column} is not bounded by the degree box beta")]
    GeneratorExceedsBox { column: usize },

    #[error("right-hand side is not bounded by the degree box beta")]
    RhsExceedsBox,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("lattice box with beta {beta:?} has too many points for this machine")]
    LatticeTooLarge { beta: Vec<u64> },

    #[error("invalid modulus {value} at coordinate {index}; moduli must be positive or null")]
    InvalidModulus { index: usize, value: i64 },

    #[error("shifted right-hand side is negative at row {row} ({value}); the box bound is too small to certify")]
    NegativeRhs { row: usize, value: String },

    #[error("hierarchy level {level} is outside 1..={max}")]
    LevelOutOfRange { level: u64, max: u64 },

    #[error("simplex returned a fractional vertex on a system declared totally unimodular")]
    NonIntegralVertex,

    #[error("x is not a solution of Ax = b")]
    NotASolution,

    #[error("infeasibility ray rejected: {0}")]
    RayRejected(String),

    #[error("enumeration box has {volume} points, over the budget of {budget}")]
    BoxTooLarge { volume: String, budget: u128 },

    #[error("an objective vector c is required")]
    MissingObjective,

    #[error("value does not fit the lattice coordinate type: {0}")]
    ValueTooLarge(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
