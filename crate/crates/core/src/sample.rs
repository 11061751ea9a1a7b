use rand::Rng;

use crate::error::Result;
use crate::game::WeightedGame;
use crate::pvec::ProbabilityVector;
use crate::rational::{binomial, Rational};
use crate::reduction::RPartitionInstance;

/// A valid probability vector with small random numerators: draw integer
/// masses a_t, then set p_t = a_t / sum_s C(n-1,s) a_s so the constraint
/// holds exactly. `allow_zeros` permits (but never forces) empty classes.
pub fn random_pvec<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    allow_zeros: bool,
) -> Result<ProbabilityVector> {
    let low = if allow_zeros { 0u64 } else { 1 };
    loop {
        let masses: Vec<u64> = (0..n).map(|_| rng.random_range(low..=4)).collect();
        if masses.iter().all(|&m| m == 0) {
            continue;
        }
        let total: Rational = masses
            .iter()
            .enumerate()
            .map(|(t, &m)| Rational::from(binomial(n - 1, t)) * Rational::from(m))
            .sum();
        let entries = masses
            .into_iter()
            .map(|m| Rational::from(m) / &total)
            .collect();
        return ProbabilityVector::new(entries);
    }
}

/// A regular (everywhere positive) random probability vector.
pub fn random_regular_pvec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<ProbabilityVector> {
    random_pvec(rng, n, false)
}

/// A game with integer weights in [-max_abs, max_abs] (or [0, max_abs] when
/// `nonneg`) and an integer threshold in [-n max_abs, n max_abs].
pub fn random_int_game<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_abs: i64,
    nonneg: bool,
) -> Result<WeightedGame> {
    let low = if nonneg { 0 } else { -max_abs };
    let weights = (0..n)
        .map(|_| Rational::from(rng.random_range(low..=max_abs)))
        .collect();
    let span = (n as i64) * max_abs;
    let theta = Rational::from(rng.random_range(-span..=span));
    WeightedGame::new(weights, theta)
}

/// A special-form vector with integer heads in [1, max_coeff]: the heads
/// are positive and the two tails each carry -A/2.
pub fn random_special_form<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_coeff: u64,
) -> Vec<Rational> {
    let heads: Vec<u64> = (0..n).map(|_| rng.random_range(1..=max_coeff)).collect();
    let total: u64 = heads.iter().sum();
    let tail = -(Rational::from(total) * Rational::half());
    let mut a: Vec<Rational> = heads.into_iter().map(Rational::from).collect();
    a.push(tail.clone());
    a.push(tail);
    a
}

/// A random subset-counting instance: positive entries up to `max_c` and a
/// uniformly chosen admissible k. The promise is not guaranteed; callers
/// filter with `check_rpartition_promise`.
pub fn random_rpartition_instance<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_c: u64,
) -> Result<RPartitionInstance> {
    let c: Vec<u64> = (0..n).map(|_| rng.random_range(1..=max_c)).collect();
    // Smallest and largest k allowed by the default window [n/4, 3n/4].
    let lo = n.div_ceil(4);
    let hi = 3 * n / 4;
    let k = rng.random_range(lo..=hi);
    RPartitionInstance::new(c, k)
}
