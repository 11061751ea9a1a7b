//! Exact arithmetic for semivalue power indices of weighted voting games.
//!
//! A weighted voting game on n players is the sign function
//! f(x) = sign(w | x - theta) over the cube {-1,+1}^n, with ties resolved to
//! +1. A semivalue weights each player's marginal contributions by a
//! probability vector over coalition sizes; Banzhaf and Shapley are the two
//! classic presets. Everything here computes over arbitrary-precision
//! rationals, so equality checks in the test suites are exact rather than
//! within a tolerance.
//!
//! The crate has three layers:
//!
//! * instance types ([`WeightedGame`], [`ProbabilityVector`], [`Assignment`])
//!   and semivalue computation by definition or by a pivot-counting dynamic
//!   program ([`semivalues_bruteforce`], [`semivalues_pivot_dp`]);
//! * Khintchine-style sign averages and subset-counting transformations that
//!   link partition counting, cube zero-mass, and semivalue optimization
//!   ([`khintchine`], [`reduction`], [`polytope`]);
//! * desk-scale inverse solvers that search for a game realizing a target
//!   power profile ([`inverse`]), plus a seeded self-test registry
//!   ([`selftest`]).

pub mod error;
pub mod game;
pub mod inverse;
pub mod khintchine;
pub mod polytope;
pub mod pvec;
pub mod rational;
pub mod reduction;
pub mod sample;
pub mod selftest;
pub mod semivalue;

pub use error::{Error, Result};
pub use game::{Assignment, WeightedGame, MAX_PLAYERS};
pub use pvec::{InducedDistribution, Preset, ProbabilityVector};
pub use rational::Rational;
pub use semivalue::{
    reformulation_terms, semivalues_bruteforce, semivalues_pivot_dp, verify_semivalues,
    ReformulationTerms, SemivalueVector,
};

/// Default ceiling for anything that enumerates all 2^n cube points.
pub const DEFAULT_ENUM_CAP: usize = 20;
