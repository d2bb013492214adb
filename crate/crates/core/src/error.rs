use thiserror::Error;

/// Errors shared across group construction, set operations, and verifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),

    #[error("table is not a Latin square: {0}")]
    NotLatinSquare(String),

    #[error("table has no identity at index 0")]
    NoIdentity,

    #[error("element {element} has no two-sided inverse")]
    NoInverse { element: u32 },

    #[error("associativity fails at ({a}, {b}, {c})")]
    NotAssociative { a: u32, b: u32, c: u32 },

    #[error("group order {order} exceeds configured maximum {max}")]
    OrderOverflow { order: u128, max: u64 },

    #[error("element index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: u64, order: u64 },

    #[error("operands belong to different groups")]
    GroupMismatch,

    #[error("map is not a bijection on element indices")]
    NotBijective,

    #[error("map is not multiplicative: f({a}*{b}) != f({a})*f({b})")]
    NotMultiplicative { a: u32, b: u32 },

    #[error("multiplier {u} is not a unit modulo {n}")]
    NotAUnit { u: u64, n: u64 },

    #[error("matrix is not invertible modulo {modulus}")]
    MatrixNotInvertible { modulus: u64 },

    #[error("matrix does not have order dividing {quotient} modulo {modulus}")]
    MatrixOrderMismatch { quotient: u64, modulus: u64 },

    #[error("matrix does not commute with the group action")]
    MatrixActionConflict,

    #[error("automorphism target path does not address a cyclic power node")]
    BadTargetPath,

    #[error("{what} requires {needed} but the cap is {cap} (raise with --cap-override)")]
    CapExceeded {
        what: &'static str,
        needed: u64,
        cap: u64,
    },

    #[error("operation requires nonempty input sets")]
    EmptyInput,

    #[error("operation is defined for cyclic groups only")]
    NonCyclicGroup,

    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u64),

    #[error("progression descriptors have different steps")]
    StepMismatch,

    #[error("subgroup check failed: {0}")]
    NotASubgroup(String),

    #[error("subgroup is not normal: conjugation by {by} leaves the subgroup")]
    NotNormal { by: u32 },

    #[error("hypothesis {0} fails ({1})")]
    HypothesisViolated(String, String),

    #[error("cannot parse subset literal: {0}")]
    BadSubsetLiteral(String),

    #[error("cannot parse element literal: {0}")]
    BadElementLiteral(String),

    #[error("shard index {index} out of range for {total} shards")]
    BadShard { index: u64, total: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
