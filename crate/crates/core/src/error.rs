use thiserror::Error;

use crate::rational::Rational;

/// Everything that can go wrong while building instances or running solvers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse {0:?} as a rational number")]
    InvalidRational(String),

    #[error("rational denominator must be nonzero")]
    ZeroDenominator,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("instance must have at least one coordinate")]
    EmptyInstance,

    #[error("probability vector entry p_{index} = {value} is negative")]
    NegativeEntry { index: usize, value: Rational },

    #[error("probability vector entries weighted by binomial counts sum to {sum}, expected 1")]
    NotNormalized { sum: Rational },

    #[error("unknown probability vector preset {0:?} (expected \"banzhaf\" or \"shapley\")")]
    UnknownPreset(String),

    #[error("instance size n = {n} exceeds the enumeration cap {cap}")]
    InstanceTooLarge { n: usize, cap: usize },

    #[error("weights must be nonnegative here")]
    NegativeWeights,

    #[error("scaled weights need a table of {cells} cells, over the limit {limit}")]
    WeightRangeOverflow { cells: u128, limit: u128 },

    #[error("count recovery denominator is zero for this probability vector")]
    DegenerateDenominator,

    #[error("vector is not in special form: {0}")]
    NotSpecialForm(String),

    #[error("perturbation size y = {y} must satisfy 0 < y < 1/2 < a_1 = {a1}")]
    InvalidPerturbation { y: Rational, a1: Rational },

    #[error("certificate {what} count mismatch: expected {expected}, got {got}")]
    ArityMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("player {player} kept a zero semivalue against a positive target on every iterate")]
    ZeroSemivalue { player: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
