use thiserror::Error;

use crate::extractor::Infeasibility;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands belong to different fields")]
    SpecMismatch,

    #[error("division by zero")]
    DivisionByZero,

    #[error("parity-split basis requires an even degree, got {0}")]
    OddDegree(usize),

    #[error("modulus is not an irreducible polynomial of degree {0}")]
    NotIrreducible(usize),

    #[error("length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("matrix does not have full row rank")]
    NotFullRank,

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(Infeasibility),

    #[error("instance too large: estimated cost {cost} exceeds limit {limit}")]
    InstanceTooLarge { cost: u128, limit: u128 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed data: {0}")]
    Format(String),
}
