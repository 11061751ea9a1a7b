use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Assignment, WeightedGame, MAX_PLAYERS};
use crate::khintchine::{khintchine, partition_probability, KhintchineMethod};
use crate::pvec::ProbabilityVector;
use crate::rational::{binomial, Rational};
use crate::semivalue::semivalues_bruteforce;

/// A subset-counting instance: how many subsets of `c` hit half the total,
/// under the promise that every such subset has size k or n-k.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawRPartition")]
pub struct RPartitionInstance {
    c: Vec<u64>,
    k: usize,
}

#[derive(Deserialize)]
struct RawRPartition {
    c: Vec<u64>,
    k: usize,
}

impl TryFrom<RawRPartition> for RPartitionInstance {
    type Error = Error;

    fn try_from(raw: RawRPartition) -> Result<Self> {
        RPartitionInstance::new(raw.c, raw.k)
    }
}

impl RPartitionInstance {
    /// Builds an instance with the default size-fraction window [1/4, 3/4].
    pub fn new(c: Vec<u64>, k: usize) -> Result<Self> {
        Self::with_bounds(c, k, &Rational::new(1, 4)?, &Rational::new(3, 4)?)
    }

    /// `k` must lie within [b1 n, b2 n]: the promise only has bite when the
    /// solution sizes stay linearly far from both 0 and n.
    pub fn with_bounds(c: Vec<u64>, k: usize, b1: &Rational, b2: &Rational) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::EmptyInstance);
        }
        if !b1.is_positive() || b2 < b1 || !(b2 - &Rational::one()).is_negative() {
            return Err(Error::Precondition(format!(
                "size fractions must satisfy 0 < b1 <= b2 < 1; got b1 = {b1}, b2 = {b2}"
            )));
        }
        if let Some(i) = c.iter().position(|&ci| ci == 0) {
            return Err(Error::Precondition(format!(
                "c_{} must be a positive integer",
                i + 1
            )));
        }
        let n = c.len();
        let total: u64 = c.iter().sum();
        if total > 1 << 40 {
            return Err(Error::Precondition(format!(
                "total weight {total} is too large for exact counting"
            )));
        }
        let kq = Rational::from(k);
        let nq = Rational::from(n);
        if kq < b1 * &nq || kq > b2 * &nq {
            return Err(Error::Precondition(format!(
                "k = {k} outside [{b1}*{n}, {b2}*{n}]"
            )));
        }
        Ok(Self { c, k })
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn c(&self) -> &[u64] {
        &self.c
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn total(&self) -> u64 {
        self.c.iter().sum()
    }
}

/// Result of brute-forcing the half-sum subsets.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PromiseCheck {
    /// Every half-sum subset has size k or n-k.
    pub holds: bool,
    /// Exact number of half-sum subsets (0 when the total is odd).
    pub count: u64,
}

/// Enumerates all subsets and checks the size promise. An odd total admits
/// no solutions, so the promise holds vacuously with count 0.
pub fn check_rpartition_promise(inst: &RPartitionInstance, cap: usize) -> Result<PromiseCheck> {
    let n = inst.n();
    if n > cap.min(MAX_PLAYERS) {
        return Err(Error::InstanceTooLarge {
            n,
            cap: cap.min(MAX_PLAYERS),
        });
    }
    let total = inst.total();
    if total % 2 == 1 {
        return Ok(PromiseCheck {
            holds: true,
            count: 0,
        });
    }
    let half = total / 2;
    let mut count = 0u64;
    let mut holds = true;
    for mask in 0..1u64 << n {
        let sum: u64 = inst
            .c
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &ci)| ci)
            .sum();
        if sum == half {
            count += 1;
            let size = mask.count_ones() as usize;
            if size != inst.k && size != n - inst.k {
                holds = false;
            }
        }
    }
    Ok(PromiseCheck { holds, count })
}

/// Maps c to the zero-sum vector (c_1..c_n, -W/2, -W/2). When W is odd the
/// whole vector is doubled first; positive scaling preserves the zero set
/// and the subset-size structure, and keeps every coordinate an integer.
pub fn reduce_rpartition_to_partition(inst: &RPartitionInstance) -> Vec<Rational> {
    let total = inst.total();
    let scale: u64 = if total % 2 == 1 { 2 } else { 1 };
    let half = total * scale / 2;
    let mut w: Vec<Rational> = inst
        .c
        .iter()
        .map(|&ci| Rational::from(ci * scale))
        .collect();
    w.push(-Rational::from(half));
    w.push(-Rational::from(half));
    w
}

/// Inverts the reduction: extracts the subset count from the zero-mass
/// probability. Interior zeros come in pairs per solution (the two tail
/// sign choices), landing in weight classes k, k+1, n-k, n-k+1 of the
/// (n+2)-dimensional cube; the extremes contribute p_0 + p_{n+1}.
pub fn recover_count_from_partition_prob(
    prob: &Rational,
    p: &ProbabilityVector,
    k: usize,
    n: usize,
) -> Result<Rational> {
    if p.n() != n + 2 {
        return Err(Error::DimensionMismatch {
            expected: n + 2,
            got: p.n(),
        });
    }
    let denom = p.p((n - k + 1) as isize)
        + p.p((n - k) as isize)
        + p.p((k + 1) as isize)
        + p.p(k as isize);
    if !denom.is_positive() {
        return Err(Error::DegenerateDenominator);
    }
    let extremes = p.p(0) + p.p((n + 1) as isize);
    Ok((p.lambda() * prob - extremes) / denom)
}

/// One full run of the counting reduction, with everything needed to audit
/// it: the zero-sum vector, its exact zero-mass probability, the recovered
/// count, and the ground-truth subset census.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RPartitionPipeline {
    pub vector: Vec<Rational>,
    pub probability: Rational,
    pub recovered: Rational,
    pub promise: PromiseCheck,
}

pub fn run_rpartition_pipeline(
    inst: &RPartitionInstance,
    p: &ProbabilityVector,
    cap: usize,
) -> Result<RPartitionPipeline> {
    let promise = check_rpartition_promise(inst, cap)?;
    let vector = reduce_rpartition_to_partition(inst);
    let probability = partition_probability(&vector, p)?;
    let recovered = recover_count_from_partition_prob(&probability, p, inst.k(), inst.n())?;
    Ok(RPartitionPipeline {
        vector,
        probability,
        recovered,
        promise,
    })
}

/// Validates the special form (a_1..a_n, -A/2, -A/2) with all a_i > 0 and
/// A = a_1 + ... + a_n; returns n.
pub fn check_special_form(a: &[Rational]) -> Result<usize> {
    if a.len() < 3 {
        return Err(Error::NotSpecialForm(format!(
            "need n + 2 >= 3 coordinates, got {}",
            a.len()
        )));
    }
    let n = a.len() - 2;
    for (i, ai) in a[..n].iter().enumerate() {
        if !ai.is_positive() {
            return Err(Error::NotSpecialForm(format!(
                "coordinate {} = {ai} must be positive",
                i + 1
            )));
        }
    }
    let total: Rational = a[..n].iter().sum();
    let tail = -(total * Rational::half());
    for (i, t) in a[n..].iter().enumerate() {
        if t != &tail {
            return Err(Error::NotSpecialForm(format!(
                "tail coordinate {} = {t}, expected {tail}",
                n + i + 1
            )));
        }
    }
    Ok(n)
}

/// The three perturbed vectors whose Khintchine constants reveal the
/// zero-mass of a: c doubles a, while d and e shift coordinate 1 by -+y and
/// both tails by +-y/2, keeping every vector zero-sum.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct KhintchineTriple {
    c: Vec<Rational>,
    d: Vec<Rational>,
    e: Vec<Rational>,
    y: Rational,
}

impl KhintchineTriple {
    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    pub fn d(&self) -> &[Rational] {
        &self.d
    }

    pub fn e(&self) -> &[Rational] {
        &self.e
    }

    pub fn y(&self) -> &Rational {
        &self.y
    }

    /// The underlying special-form vector, c/2.
    pub fn base(&self) -> Vec<Rational> {
        self.c.iter().map(|v| v * Rational::half()).collect()
    }
}

pub fn build_khintchine_triple(a: &[Rational], y: &Rational) -> Result<KhintchineTriple> {
    let n = check_special_form(a)?;
    let half = Rational::half();
    if !y.is_positive() || y >= &half || a[0] <= half {
        return Err(Error::InvalidPerturbation {
            y: y.clone(),
            a1: a[0].clone(),
        });
    }

    let c: Vec<Rational> = a.iter().map(|v| v * Rational::from(2)).collect();
    let half_y = y * &half;
    let mut d = a.to_vec();
    d[0] -= y;
    d[n] += &half_y;
    d[n + 1] += &half_y;
    let mut e = a.to_vec();
    e[0] += y;
    e[n] -= &half_y;
    e[n + 1] -= &half_y;
    Ok(KhintchineTriple {
        c,
        d,
        e,
        y: y.clone(),
    })
}

/// The recovery display: Pr[a·x = 0] = (Kd + Ke - Kc)/(2y) + (p_0 + p_{n+1})/Lambda.
/// The first term captures interior zeros, the second the two constant points
/// where a zero-sum vector always vanishes.
pub fn recover_prob_from_khintchine(
    kd: &Rational,
    ke: &Rational,
    kc: &Rational,
    y: &Rational,
    p: &ProbabilityVector,
) -> Result<Rational> {
    if !y.is_positive() {
        return Err(Error::Precondition(format!(
            "perturbation size y = {y} must be positive"
        )));
    }
    let interior = (kd + ke - kc) / (Rational::from(2) * y);
    let extremes = (p.p(0) + p.p(p.n() as isize - 1)) / p.lambda();
    Ok(interior + extremes)
}

/// Audit report for one Khintchine triple.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct TripleChecks {
    /// Per-point case split: |d·x| + |e·x| = |c·x| off the zero set, and
    /// = 2y on interior zeros.
    pub pointwise: bool,
    /// K(d) + K(e) - K(c) = 2y Pr[interior zero].
    pub aggregate: bool,
    /// Output of the recovery formula from the three constants.
    pub recovered_probability: Rational,
    /// Recovery agrees with the directly computed partition probability.
    pub partition_match: bool,
}

impl TripleChecks {
    pub fn all_hold(&self) -> bool {
        self.pointwise && self.aggregate && self.partition_match
    }
}

pub fn check_triple_identities(
    triple: &KhintchineTriple,
    p: &ProbabilityVector,
    cap: usize,
) -> Result<TripleChecks> {
    let a = triple.base();
    let n = check_special_form(&a)?;
    let m = n + 2;
    if m != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            got: m,
        });
    }
    if m > cap.min(MAX_PLAYERS) {
        return Err(Error::InstanceTooLarge {
            n: m,
            cap: cap.min(MAX_PLAYERS),
        });
    }

    let dot = |v: &[Rational], x: &Assignment| -> Rational {
        v.iter()
            .enumerate()
            .map(|(i, vi)| {
                if x.sign(i) == 1 {
                    vi.clone()
                } else {
                    -vi
                }
            })
            .sum()
    };

    let two_y = Rational::from(2) * triple.y();
    let mut pointwise = true;
    let mut interior_mass = Rational::zero();
    for x in Assignment::cube(m) {
        let cx = dot(triple.c(), &x);
        let de = dot(triple.d(), &x).abs() + dot(triple.e(), &x).abs();
        if !cx.is_zero() {
            pointwise &= de == cx.abs();
        } else if x.sign(n) != x.sign(n + 1) {
            pointwise &= de == two_y;
            interior_mass += p.mu_prime(&x)?;
        } else {
            // Zero with equal tails happens only at the constant points,
            // where all three vectors vanish.
            pointwise &= x.is_extreme() && de.is_zero();
        }
    }
    let interior_prob = interior_mass / p.lambda();

    let k_of = |v: &[Rational]| -> Result<Rational> {
        Ok(khintchine(v, p, KhintchineMethod::Dp, cap)?.value)
    };
    let kd = k_of(triple.d())?;
    let ke = k_of(triple.e())?;
    let kc = k_of(triple.c())?;
    let aggregate = &kd + &ke - &kc == two_y * &interior_prob;

    let recovered_probability = recover_prob_from_khintchine(&kd, &ke, &kc, triple.y(), p)?;
    let partition_match = recovered_probability == partition_probability(&a, p)?;
    Ok(TripleChecks {
        pointwise,
        aggregate,
        recovered_probability,
        partition_match,
    })
}

/// A verification instance produced by the positive-weight transfer: flip
/// the two tail weights positive and shift the targets so that YES/NO
/// status is preserved exactly.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PtonInstance {
    pub weights: Vec<Rational>,
    pub theta: Rational,
    pub targets: Vec<Rational>,
}

/// Target shift for the first n players: their semivalues change by
/// -2(p_{n+1} - p_{n-1}) when the tails flip sign.
pub fn pton_head_shift(p: &ProbabilityVector, n: usize) -> Rational {
    -Rational::from(2) * (p.p(n as isize + 1) - p.p(n as isize - 1))
}

/// Target shift for the two tail players: +2 sum_{t=0}^{n-1} C(n,t)(p_t + p_{t+1}).
pub fn pton_tail_shift(p: &ProbabilityVector, n: usize) -> Rational {
    let sum: Rational = (0..n)
        .map(|t| Rational::from(binomial(n, t)) * (p.p(t as isize) + p.p(t as isize + 1)))
        .sum();
    Rational::from(2) * sum
}

pub fn pton_transform(
    weights: &[Rational],
    targets: &[Rational],
    p: &ProbabilityVector,
) -> Result<PtonInstance> {
    let n = check_special_form(weights)?;
    let m = n + 2;
    if targets.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: targets.len(),
        });
    }
    if p.n() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: p.n(),
        });
    }

    let mut new_weights = weights.to_vec();
    new_weights[n] = -&new_weights[n];
    new_weights[n + 1] = -&new_weights[n + 1];

    let head = pton_head_shift(p, n);
    let tail = pton_tail_shift(p, n);
    let new_targets = targets
        .iter()
        .enumerate()
        .map(|(i, t)| if i < n { t + &head } else { t + &tail })
        .collect();
    Ok(PtonInstance {
        weights: new_weights,
        theta: Rational::zero(),
        targets: new_targets,
    })
}

/// Checks the transfer identities directly: the semivalues of the
/// positive-weight game equal those of the special-form game shifted by
/// the head/tail amounts.
pub fn check_pton_identities(
    weights: &[Rational],
    p: &ProbabilityVector,
    cap: usize,
) -> Result<bool> {
    let n = check_special_form(weights)?;
    let f = WeightedGame::new(weights.to_vec(), Rational::zero())?;
    let mut pos = weights.to_vec();
    pos[n] = -&pos[n];
    pos[n + 1] = -&pos[n + 1];
    let g = WeightedGame::new(pos, Rational::zero())?;

    let sf = semivalues_bruteforce(&f, p, cap)?;
    let sg = semivalues_bruteforce(&g, p, cap)?;
    let head = pton_head_shift(p, n);
    let tail = pton_tail_shift(p, n);
    let ok = (0..n + 2).all(|i| {
        let shift = if i < n { &head } else { &tail };
        sg.get(i) == &(sf.get(i) + shift)
    });
    Ok(ok)
}
