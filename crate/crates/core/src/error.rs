use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("modulus {0} is not a valid torsion order (must be at least 2)")]
    BadModulus(u64),
    #[error("partition parts must be positive")]
    BadPartition,
    #[error("length vector is undefined for a module of positive rank")]
    PositiveRank,
    #[error("invariant factor {0} exceeds the factorization cap (2^63)")]
    FactorTooLarge(String),
    #[error("supports are not aligned: {0}")]
    SupportMismatch(String),
    #[error("morphism is ill-defined: {0}")]
    IllDefinedMorphism(String),
    #[error("{0}")]
    BadFamilyParameter(String),
    #[error("no corresponding subgroup: {0}")]
    NoSubgroup(String),
    #[error("target is not in the closure: {0}")]
    NotInClosure(ClosureViolation),
    #[error("universe bounds violated: {0}")]
    OutOfBounds(String),
    #[error("derivation too large: {0}")]
    WitnessTooLarge(String),
}

/// Why a target module fails membership in a closure, as reported by the
/// witness engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureViolation {
    /// The closure is empty; nothing is derivable.
    EmptyClosure,
    /// The rank class is wrong (rank not divisible by the closure modulus,
    /// or positive rank against a torsion-only closure).
    RankClass { modulus: u64, rank: u64 },
    /// The length vector is not in the closure lattice (this covers torsion
    /// outside the support as well as vectors missing from the subgroup).
    LatticeMembership { detail: String },
}

impl std::fmt::Display for ClosureViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClosureViolation::EmptyClosure => write!(f, "the closure of no generators is empty"),
            ClosureViolation::RankClass { modulus, rank } => {
                write!(f, "rank class violated: rank {rank} is not a multiple of {modulus}")
            }
            ClosureViolation::LatticeMembership { detail } => {
                write!(f, "lattice membership violated: {detail}")
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
