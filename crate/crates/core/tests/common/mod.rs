//! Reference implementations used to cross-check the library. Everything
//! here recomputes from first principles over raw bitmasks; none of it
//! shares evaluation or counting code with the crate under test.

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use svf_core::pvec::ProbabilityVector;
use svf_core::rational::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(s: &str) -> Rational {
    s.parse().expect("rational literal")
}

pub fn qv(parts: &[&str]) -> Vec<Rational> {
    parts.iter().map(|s| q(s)).collect()
}

/// a . x for the assignment encoded by `mask` (bit i set means x_i = +1).
fn dot(a: &[Rational], mask: u64) -> Rational {
    let mut acc = Rational::zero();
    for (i, ai) in a.iter().enumerate() {
        if mask >> i & 1 == 1 {
            acc += ai;
        } else {
            acc -= ai;
        }
    }
    acc
}

/// Game outcome sign(w . x - theta) in {-1, +1}, ties winning.
fn outcome(weights: &[Rational], theta: &Rational, mask: u64) -> i64 {
    let margin = dot(weights, mask) - theta;
    if margin.is_negative() {
        -1
    } else {
        1
    }
}

/// Semivalues straight from the definition: the pair of half-cube sums
/// weighted by p at the assignment weight (number of +1 coordinates),
/// using the convention p_{-1} = p_n = 0.
pub fn naive_semivalues(
    weights: &[Rational],
    theta: &Rational,
    p: &ProbabilityVector,
) -> Vec<Rational> {
    let n = weights.len();
    assert_eq!(p.n(), n, "oracle needs a scheme sized to the game");
    let mut sv = vec![Rational::zero(); n];
    for mask in 0..1u64 << n {
        let wt = mask.count_ones() as isize;
        let f = Rational::from(outcome(weights, theta, mask));
        for (i, s) in sv.iter_mut().enumerate() {
            if mask >> i & 1 == 1 {
                *s += p.p(wt - 1) * &f;
            } else {
                *s -= p.p(wt) * &f;
            }
        }
    }
    sv
}

/// Shapley semivalues by direct permutation enumeration: average the
/// marginal outcome change over every arrival order.
pub fn shapley_by_permutations(weights: &[Rational], theta: &Rational) -> Vec<Rational> {
    let n = weights.len();
    let mut acc = vec![Rational::zero(); n];
    let mut orders = 0u64;
    for perm in (0..n).permutations(n) {
        orders += 1;
        let mut mask = 0u64;
        for i in perm {
            let before = outcome(weights, theta, mask);
            mask |= 1 << i;
            let after = outcome(weights, theta, mask);
            acc[i] += Rational::from(after - before);
        }
    }
    let total = Rational::from(orders);
    acc.into_iter().map(|v| v / &total).collect()
}

/// Unnormalized point mass p_{wt(x)} + p_{wt(x)-1}.
fn raw_mass(p: &ProbabilityVector, mask: u64) -> Rational {
    let wt = mask.count_ones() as isize;
    p.p(wt) + p.p(wt - 1)
}

/// E|a . x| under the induced distribution, by full enumeration with the
/// normalizer recomputed from scratch.
pub fn naive_khintchine(a: &[Rational], p: &ProbabilityVector) -> Rational {
    let n = a.len();
    assert_eq!(p.n(), n);
    let mut num = Rational::zero();
    let mut den = Rational::zero();
    for mask in 0..1u64 << n {
        let m = raw_mass(p, mask);
        let d = dot(a, mask);
        let abs = if d.is_negative() { -d } else { d };
        num += abs * &m;
        den += m;
    }
    num / den
}

/// Pr[a . x = 0] under the induced distribution, by full enumeration.
pub fn naive_zero_mass(a: &[Rational], p: &ProbabilityVector) -> Rational {
    let n = a.len();
    assert_eq!(p.n(), n);
    let mut num = Rational::zero();
    let mut den = Rational::zero();
    for mask in 0..1u64 << n {
        let m = raw_mass(p, mask);
        if dot(a, mask).is_zero() {
            num += &m;
        }
        den += m;
    }
    num / den
}

/// Number of subsets summing to half the total (0 when the total is odd).
pub fn half_sum_subsets(c: &[u64]) -> u64 {
    let total: u64 = c.iter().sum();
    if total % 2 == 1 {
        return 0;
    }
    let mut count = 0;
    for mask in 0..1u64 << c.len() {
        let s: u64 = c
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, v)| v)
            .sum();
        if 2 * s == total {
            count += 1;
        }
    }
    count
}

/// Sizes of every half-sum subset, for checking the size promise directly.
pub fn half_sum_subset_sizes(c: &[u64]) -> Vec<usize> {
    let total: u64 = c.iter().sum();
    let mut sizes = Vec::new();
    if total % 2 == 1 {
        return sizes;
    }
    for mask in 0..1u64 << c.len() {
        let s: u64 = c
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, v)| v)
            .sum();
        if 2 * s == total {
            sizes.push(mask.count_ones() as usize);
        }
    }
    sizes
}
