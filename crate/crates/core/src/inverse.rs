use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{int_game_wins, WeightedGame};
use crate::pvec::ProbabilityVector;
use crate::rational::Rational;
use crate::semivalue::semivalues_bruteforce;

/// Work bound for the enumeration scan: candidate count times truth-table
/// size must stay below this.
const ENUM_WORK_LIMIT: u128 = 1 << 30;

/// Players supported by the enumeration at the default bound.
pub const ENUM_MAX_PLAYERS: usize = 8;

/// Default head-coordinate bound for canonical enumeration.
pub const DEFAULT_INVERSE_BOUND: u64 = 3;

/// A target semivalue vector with its threshold and probability vector: find
/// nonnegative weights summing to 1 whose semivalues hit the targets exactly.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawInverseInstance")]
pub struct InverseInstance {
    targets: Vec<Rational>,
    theta: Rational,
    pvec: ProbabilityVector,
}

#[derive(Deserialize)]
struct RawInverseInstance {
    targets: Vec<Rational>,
    theta: Rational,
    pvec: ProbabilityVector,
}

impl TryFrom<RawInverseInstance> for InverseInstance {
    type Error = Error;

    fn try_from(raw: RawInverseInstance) -> Result<Self> {
        InverseInstance::new(raw.targets, raw.theta, raw.pvec)
    }
}

impl InverseInstance {
    pub fn new(
        targets: Vec<Rational>,
        theta: Rational,
        pvec: ProbabilityVector,
    ) -> Result<Self> {
        if targets.len() != pvec.n() {
            return Err(Error::DimensionMismatch {
                expected: pvec.n(),
                got: targets.len(),
            });
        }
        Ok(Self {
            targets,
            theta,
            pvec,
        })
    }

    pub fn n(&self) -> usize {
        self.targets.len()
    }

    pub fn targets(&self) -> &[Rational] {
        &self.targets
    }

    pub fn theta(&self) -> &Rational {
        &self.theta
    }

    pub fn pvec(&self) -> &ProbabilityVector {
        &self.pvec
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseStatus {
    Found,
    /// No game in the enumerated class matches; says nothing about games
    /// outside the class.
    NoSolutionInClass,
    Nearest,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceNorm {
    L1,
    L2,
}

/// Outcome of a solver run. `weights` are normalized to sum 1 when present;
/// `distance` is the l1 or squared l2 distance for nearest/heuristic modes;
/// `games_examined` counts the candidate evaluations performed.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct InverseResult {
    pub status: InverseStatus,
    pub weights: Option<Vec<Rational>>,
    pub distance: Option<Rational>,
    pub games_examined: u64,
}

/// All games with integer weights in [0, bound]^n (the all-zero vector
/// excluded) and integer thresholds in [-n bound, n bound], deduplicated by
/// truth table. Each class keeps its lexicographically smallest (weights,
/// theta), and the list comes back in that canonical order.
pub fn enumerate_canonical_games(n: usize, bound: u64) -> Result<Vec<WeightedGame>> {
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    if bound == 0 {
        return Err(Error::Precondition("enumeration bound must be positive".into()));
    }
    let combos = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(bound as u128 + 1));
    let thetas = 2 * (n as u128) * (bound as u128) + 1;
    let work = combos
        .and_then(|c| c.checked_mul(thetas))
        .and_then(|c| c.checked_mul(1u128 << n));
    if n > 24 || work.is_none_or(|w| w > ENUM_WORK_LIMIT) {
        return Err(Error::InstanceTooLarge {
            n,
            cap: ENUM_MAX_PLAYERS,
        });
    }

    let theta_abs = (n as i64) * (bound as i64);
    let mut seen = std::collections::HashSet::new();
    let mut games = Vec::new();
    let mut w = vec![0i64; n];
    loop {
        if w.iter().any(|&wi| wi != 0) {
            for theta in -theta_abs..=theta_abs {
                let table = int_truth_table(&w, theta, n);
                if seen.insert(table) {
                    let weights = w.iter().map(|&wi| Rational::from(wi)).collect();
                    games.push(WeightedGame::new(weights, Rational::from(theta))?);
                }
            }
        }
        // Advance the least-significant (rightmost) coordinate so vectors
        // appear in lexicographic order.
        let mut done = true;
        for wi in w.iter_mut().rev() {
            if *wi < bound as i64 {
                *wi += 1;
                done = false;
                break;
            }
            *wi = 0;
        }
        if done {
            break;
        }
    }
    Ok(games)
}

fn int_truth_table(weights: &[i64], theta: i64, n: usize) -> Vec<u64> {
    let mut bits = vec![0u64; ((1usize << n) + 63) / 64];
    for mask in 0..1u64 << n {
        if int_game_wins(weights, theta, mask) {
            bits[(mask >> 6) as usize] |= 1 << (mask & 63);
        }
    }
    bits
}

/// A candidate (w, theta_w) can represent the instance only if normalizing
/// w to sum 1 carries theta_w onto the instance threshold, i.e.
/// theta_w = theta * sum(w).
fn eligible_theta(candidate: &WeightedGame, theta: &Rational) -> bool {
    candidate.theta() == &(theta * candidate.total_weight())
}

/// Scans the canonical class for an exact semivalue match; first match wins,
/// reported with weights normalized to sum 1.
pub fn inverse_exact(inst: &InverseInstance, bound: u64) -> Result<InverseResult> {
    let cap = inst.n();
    let mut examined = 0u64;
    for candidate in enumerate_canonical_games(inst.n(), bound)? {
        if !eligible_theta(&candidate, inst.theta()) {
            continue;
        }
        examined += 1;
        let sv = semivalues_bruteforce(&candidate, inst.pvec(), cap)?;
        if sv.values() == inst.targets() {
            let normalized = candidate.normalized()?;
            return Ok(InverseResult {
                status: InverseStatus::Found,
                weights: Some(normalized.weights().to_vec()),
                distance: None,
                games_examined: examined,
            });
        }
    }
    Ok(InverseResult {
        status: InverseStatus::NoSolutionInClass,
        weights: None,
        distance: None,
        games_examined: examined,
    })
}

fn distance(norm: DistanceNorm, got: &[Rational], want: &[Rational]) -> Rational {
    got.iter()
        .zip(want)
        .map(|(g, w)| {
            let d = g - w;
            match norm {
                DistanceNorm::L1 => d.abs(),
                DistanceNorm::L2 => &d * &d,
            }
        })
        .sum()
}

/// Scans the canonical class for the semivalue vector closest to the
/// targets. Distance 0 upgrades the status to found. Enumeration order
/// breaks ties toward the lexicographically smallest weights.
pub fn inverse_nearest(
    inst: &InverseInstance,
    bound: u64,
    norm: DistanceNorm,
) -> Result<InverseResult> {
    let cap = inst.n();
    let mut examined = 0u64;
    let mut best: Option<(Rational, WeightedGame)> = None;
    for candidate in enumerate_canonical_games(inst.n(), bound)? {
        if !eligible_theta(&candidate, inst.theta()) {
            continue;
        }
        examined += 1;
        let sv = semivalues_bruteforce(&candidate, inst.pvec(), cap)?;
        let d = distance(norm, sv.values(), inst.targets());
        if best.as_ref().is_none_or(|(bd, _)| &d < bd) {
            best = Some((d, candidate));
        }
    }
    match best {
        None => Ok(InverseResult {
            status: InverseStatus::NoSolutionInClass,
            weights: None,
            distance: None,
            games_examined: examined,
        }),
        Some((d, game)) => {
            let status = if d.is_zero() {
                InverseStatus::Found
            } else {
                InverseStatus::Nearest
            };
            Ok(InverseResult {
                status,
                weights: Some(game.normalized()?.weights().to_vec()),
                distance: Some(d),
                games_examined: examined,
            })
        }
    }
}

/// Multiplicative fitting under the Banzhaf vector: each weight is scaled
/// toward its target/semivalue ratio (clamped to [1/2, 2], damped by
/// `step`), renormalized, and re-evaluated exactly. Returns the best iterate
/// by squared l2 distance; convergence is not guaranteed.
pub fn iterative_banzhaf_heuristic(
    inst: &InverseInstance,
    iterations: usize,
    step: &Rational,
    cap: usize,
) -> Result<InverseResult> {
    let n = inst.n();
    if inst.pvec() != &ProbabilityVector::banzhaf(n)? {
        return Err(Error::Precondition(
            "the iterative heuristic is defined for the Banzhaf vector only".into(),
        ));
    }
    if let Some(i) = inst.targets().iter().position(Rational::is_negative) {
        return Err(Error::Precondition(format!(
            "target {} is negative; games with nonnegative weights cannot reach it",
            i + 1
        )));
    }
    if !step.is_positive() || step > &Rational::one() {
        return Err(Error::Precondition(format!(
            "step size {step} must lie in (0, 1]"
        )));
    }

    let uniform = Rational::new(1, n as i64)?;
    let mut weights = vec![uniform; n];
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    let mut examined = 0u64;
    // Players whose positive target never saw a nonzero semivalue.
    let mut starved = vec![true; n];

    for _ in 0..=iterations {
        let game = WeightedGame::new(weights.clone(), inst.theta().clone())?;
        let sv = semivalues_bruteforce(&game, inst.pvec(), cap)?;
        examined += 1;
        for (flag, (t, s)) in starved
            .iter_mut()
            .zip(inst.targets().iter().zip(sv.values()))
        {
            *flag &= t.is_positive() && s.is_zero();
        }
        let d = distance(DistanceNorm::L2, sv.values(), inst.targets());
        let improved = best.as_ref().is_none_or(|(bd, _)| &d < bd);
        if improved {
            best = Some((d.clone(), weights.clone()));
        }
        if d.is_zero() {
            break;
        }

        let two = Rational::from(2);
        for (w, (t, s)) in weights
            .iter_mut()
            .zip(inst.targets().iter().zip(sv.values()))
        {
            let ratio = if s.is_zero() {
                if t.is_positive() {
                    two.clone()
                } else {
                    Rational::one()
                }
            } else {
                let r = t / s;
                if r < Rational::half() {
                    Rational::half()
                } else if r > two {
                    two.clone()
                } else {
                    r
                }
            };
            *w *= Rational::one() + step * (ratio - Rational::one());
        }
        let total: Rational = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= &total;
        }
    }

    if let Some(player) = starved
        .iter()
        .position(|&s| s)
        .filter(|&i| inst.targets()[i].is_positive())
    {
        return Err(Error::ZeroSemivalue { player });
    }
    let (d, weights) = best.expect("at least one iterate evaluated");
    let status = if d.is_zero() {
        InverseStatus::Found
    } else {
        InverseStatus::Nearest
    };
    Ok(InverseResult {
        status,
        weights: Some(weights),
        distance: Some(d),
        games_examined: examined,
    })
}

/// Outcome of the equal-semivalue agreement check. When the hypothesis
/// holds (equal semivalue vectors), `violations` lists every support point
/// where the two games disagree; any entry falsifies the implementation,
/// not the statement.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct UniquenessReport {
    pub semivalues_equal: bool,
    pub violations: Vec<Vec<i8>>,
    pub points_checked: u64,
}

impl UniquenessReport {
    /// Hypothesis met and no disagreements found.
    pub fn holds(&self) -> bool {
        self.semivalues_equal && self.violations.is_empty()
    }
}

/// For games with equal weight sums and equal thresholds whose semivalue
/// vectors agree, the truth tables must agree on every point that carries
/// probability mass and does not sit on both separating hyperplanes at once.
pub fn uniqueness_check(
    f: &WeightedGame,
    g: &WeightedGame,
    p: &ProbabilityVector,
    cap: usize,
) -> Result<UniquenessReport> {
    let n = f.n();
    if g.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g.n(),
        });
    }
    if p.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.n(),
        });
    }
    if f.total_weight() != g.total_weight() {
        return Err(Error::Precondition(format!(
            "weight sums differ: {} vs {}",
            f.total_weight(),
            g.total_weight()
        )));
    }
    if f.theta() != g.theta() {
        return Err(Error::Precondition(format!(
            "thresholds differ: {} vs {}",
            f.theta(),
            g.theta()
        )));
    }

    let sf = semivalues_bruteforce(f, p, cap)?;
    let sg = semivalues_bruteforce(g, p, cap)?;
    if sf != sg {
        return Ok(UniquenessReport {
            semivalues_equal: false,
            violations: Vec::new(),
            points_checked: 0,
        });
    }

    let mut violations = Vec::new();
    let mut points_checked = 0u64;
    for x in crate::game::Assignment::cube(n) {
        if !p.mu_prime_for_weight(x.weight() as usize).is_positive() {
            continue;
        }
        let fd = f.dot(&x)? - f.theta();
        let gd = g.dot(&x)? - g.theta();
        if fd.is_zero() && gd.is_zero() {
            continue;
        }
        points_checked += 1;
        let fv = if fd.is_negative() { -1i8 } else { 1 };
        let gv = if gd.is_negative() { -1i8 } else { 1 };
        if fv != gv {
            violations.push(x.signs());
        }
    }
    Ok(UniquenessReport {
        semivalues_equal: true,
        violations,
        points_checked,
    })
}

/// Decides SV-Verification through an inverse oracle: normalize the input
/// game, hand (targets, theta / sum w) to the oracle, and accept iff the
/// oracle finds weights whose game agrees with the input on every point of
/// positive probability mass. Disagreement search replaces the certificate
/// oracle in the source argument.
pub fn verification_via_inverse<F>(
    game: &WeightedGame,
    targets: &[Rational],
    p: &ProbabilityVector,
    oracle: F,
    cap: usize,
) -> Result<bool>
where
    F: FnOnce(&InverseInstance) -> Result<InverseResult>,
{
    let n = game.n();
    if !game.has_nonnegative_weights() {
        return Err(Error::NegativeWeights);
    }
    if targets.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: targets.len(),
        });
    }
    if p.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.n(),
        });
    }
    if n > cap {
        return Err(Error::InstanceTooLarge { n, cap });
    }

    let normalized = game.normalized()?;
    let inst = InverseInstance::new(
        targets.to_vec(),
        normalized.theta().clone(),
        p.clone(),
    )?;
    let result = oracle(&inst)?;
    if result.status != InverseStatus::Found {
        return Ok(false);
    }
    let weights = result
        .weights
        .ok_or_else(|| Error::Precondition("oracle reported found without weights".into()))?;
    let candidate = WeightedGame::new(weights, normalized.theta().clone())?;

    for x in crate::game::Assignment::cube(n) {
        if !p.mu_prime_for_weight(x.weight() as usize).is_positive() {
            continue;
        }
        if normalized.eval(&x)? != candidate.eval(&x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::truth_table;
    use crate::semivalue::verify_semivalues;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn qv(ss: &[&str]) -> Vec<Rational> {
        ss.iter().map(|s| q(s)).collect()
    }

    fn banzhaf(n: usize) -> ProbabilityVector {
        ProbabilityVector::banzhaf(n).unwrap()
    }

    fn shapley(n: usize) -> ProbabilityVector {
        ProbabilityVector::shapley(n).unwrap()
    }

    fn game(ws: &[&str], theta: &str) -> WeightedGame {
        WeightedGame::new(qv(ws), q(theta)).unwrap()
    }

    #[test]
    fn enumeration_census() {
        // n = 1: constant +1 and the dictator; constant -1 would need
        // theta = 2, outside [-1, 1].
        let games = enumerate_canonical_games(1, 1).unwrap();
        assert_eq!(games.len(), 2);

        // n = 2: constants, dictators, OR, AND.
        let games = enumerate_canonical_games(2, 1).unwrap();
        assert_eq!(games.len(), 6);
        let tables: Vec<_> = games.iter().map(truth_table).collect();
        let mut distinct = tables.clone();
        distinct.sort();
        distinct.dedup();
        assert_eq!(distinct.len(), games.len());
        for expected in [
            game(&["0", "1"], "-2"), // constant +1
            game(&["0", "1"], "2"),  // constant -1
            game(&["1", "0"], "0"),  // dictator 1
            game(&["0", "1"], "0"),  // dictator 2
            game(&["1", "1"], "-1"), // OR
            game(&["1", "1"], "1"),  // AND
        ] {
            assert!(
                tables.contains(&truth_table(&expected)),
                "missing table of {expected:?}"
            );
        }
        // Canonical order: first game is the lex-smallest representative.
        assert_eq!(games[0], game(&["0", "1"], "-2"));

        // Raising the bound only adds scaled duplicates at n = 2.
        assert_eq!(enumerate_canonical_games(2, 2).unwrap().len(), 6);

        assert!(matches!(
            enumerate_canonical_games(0, 1),
            Err(Error::EmptyInstance)
        ));
        assert!(matches!(
            enumerate_canonical_games(2, 0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            enumerate_canonical_games(20, 100),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn exact_finds_majority() {
        let inst = InverseInstance::new(qv(&["1", "1", "1"]), q("0"), banzhaf(3)).unwrap();
        let r = inverse_exact(&inst, 1).unwrap();
        assert_eq!(r.status, InverseStatus::Found);
        let w = r.weights.unwrap();
        assert_eq!(w, qv(&["1/3", "1/3", "1/3"]));
        // Soundness: the reported weights verify exactly.
        let sum: Rational = w.iter().sum();
        assert!(sum.is_one());
        assert!(verify_semivalues(
            &WeightedGame::new(w, q("0")).unwrap(),
            &banzhaf(3),
            &qv(&["1", "1", "1"]),
            20
        )
        .unwrap());
    }

    #[test]
    fn exact_rejects_double_dictators() {
        for p in [banzhaf(3), shapley(3)] {
            let inst = InverseInstance::new(qv(&["2", "2", "2"]), q("0"), p).unwrap();
            let r = inverse_exact(&inst, 2).unwrap();
            assert_eq!(r.status, InverseStatus::NoSolutionInClass);
            assert!(r.weights.is_none());
        }
    }

    #[test]
    fn exact_finds_dictator_under_shapley() {
        let inst = InverseInstance::new(qv(&["2", "0", "0"]), q("0"), shapley(3)).unwrap();
        let r = inverse_exact(&inst, 1).unwrap();
        assert_eq!(r.status, InverseStatus::Found);
        assert_eq!(r.weights.unwrap(), qv(&["1", "0", "0"]));
    }

    #[test]
    fn exact_handles_nonzero_theta() {
        // Constant -1 game: canonical representative ((0,1), theta = 2),
        // normalized threshold 2. Semivalues are all zero.
        let inst = InverseInstance::new(qv(&["0", "0"]), q("2"), banzhaf(2)).unwrap();
        let r = inverse_exact(&inst, 1).unwrap();
        assert_eq!(r.status, InverseStatus::Found);
        assert_eq!(r.weights.unwrap(), qv(&["0", "1"]));

        // The same targets at theta = -2 hit constant +1 instead.
        let inst = InverseInstance::new(qv(&["0", "0"]), q("-2"), banzhaf(2)).unwrap();
        let r = inverse_exact(&inst, 1).unwrap();
        assert_eq!(r.status, InverseStatus::Found);
    }

    #[test]
    fn nearest_worked_example() {
        let inst =
            InverseInstance::new(qv(&["1", "1", "9/10"]), q("0"), banzhaf(3)).unwrap();
        let r = inverse_nearest(&inst, 1, DistanceNorm::L1).unwrap();
        assert_eq!(r.status, InverseStatus::Nearest);
        assert_eq!(r.weights.unwrap(), qv(&["1/3", "1/3", "1/3"]));
        assert_eq!(r.distance.unwrap(), q("1/10"));

        let r2 = inverse_nearest(&inst, 1, DistanceNorm::L2).unwrap();
        assert_eq!(r2.distance.unwrap(), q("1/100"));
    }

    #[test]
    fn nearest_upgrades_exact_hits() {
        let inst = InverseInstance::new(qv(&["1", "1", "1"]), q("0"), banzhaf(3)).unwrap();
        let r = inverse_nearest(&inst, 1, DistanceNorm::L1).unwrap();
        assert_eq!(r.status, InverseStatus::Found);
        assert_eq!(r.distance.unwrap(), q("0"));
        assert_eq!(r.weights.unwrap(), qv(&["1/3", "1/3", "1/3"]));
    }

    #[test]
    fn nearest_distance_monotone_in_bound() {
        let inst =
            InverseInstance::new(qv(&["4/3", "1/3", "1/3"]), q("0"), banzhaf(3)).unwrap();
        let d1 = inverse_nearest(&inst, 1, DistanceNorm::L1)
            .unwrap()
            .distance
            .unwrap();
        let d2 = inverse_nearest(&inst, 2, DistanceNorm::L1)
            .unwrap()
            .distance
            .unwrap();
        assert!(d2 <= d1);
    }

    #[test]
    fn heuristic_reaches_majority_immediately() {
        let inst = InverseInstance::new(qv(&["1", "1", "1"]), q("0"), banzhaf(3)).unwrap();
        let r = iterative_banzhaf_heuristic(&inst, 5, &q("1"), 20).unwrap();
        assert_eq!(r.status, InverseStatus::Found);
        assert_eq!(r.distance.unwrap(), q("0"));
        assert_eq!(r.weights.unwrap(), qv(&["1/3", "1/3", "1/3"]));
        assert_eq!(r.games_examined, 1);
    }

    #[test]
    fn heuristic_reaches_dictator() {
        let inst = InverseInstance::new(qv(&["2", "0", "0"]), q("0"), banzhaf(3)).unwrap();
        for step in ["1", "1/2"] {
            let r = iterative_banzhaf_heuristic(&inst, 10, &q(step), 20).unwrap();
            assert_eq!(r.status, InverseStatus::Found, "step {step}");
            let w = r.weights.unwrap();
            assert!(verify_semivalues(
                &WeightedGame::new(w, q("0")).unwrap(),
                &banzhaf(3),
                inst.targets(),
                20
            )
            .unwrap());
        }
    }

    #[test]
    fn heuristic_never_beats_the_start_backwards() {
        // Best-iterate selection: the reported distance cannot exceed the
        // distance of the uniform start.
        let inst =
            InverseInstance::new(qv(&["3/2", "1/2", "1/2"]), q("0"), banzhaf(3)).unwrap();
        let start = WeightedGame::new(qv(&["1/3", "1/3", "1/3"]), q("0")).unwrap();
        let sv = semivalues_bruteforce(&start, inst.pvec(), 20).unwrap();
        let start_d = distance(DistanceNorm::L2, sv.values(), inst.targets());
        let r = iterative_banzhaf_heuristic(&inst, 6, &q("1/2"), 20).unwrap();
        assert!(r.distance.unwrap() <= start_d);
    }

    #[test]
    fn heuristic_preconditions() {
        let shap = InverseInstance::new(qv(&["1", "1", "1"]), q("0"), shapley(3)).unwrap();
        assert!(matches!(
            iterative_banzhaf_heuristic(&shap, 3, &q("1"), 20),
            Err(Error::Precondition(_))
        ));
        let neg = InverseInstance::new(qv(&["-1", "1", "1"]), q("0"), banzhaf(3)).unwrap();
        assert!(matches!(
            iterative_banzhaf_heuristic(&neg, 3, &q("1"), 20),
            Err(Error::Precondition(_))
        ));
        let inst = InverseInstance::new(qv(&["1", "1", "1"]), q("0"), banzhaf(3)).unwrap();
        for step in ["0", "-1/2", "3/2"] {
            assert!(matches!(
                iterative_banzhaf_heuristic(&inst, 3, &q(step), 20),
                Err(Error::Precondition(_))
            ));
        }
    }

    #[test]
    fn heuristic_reports_starved_players() {
        // theta = 5 leaves every unit-sum game constant, so semivalues stay
        // zero while target 1 is positive.
        let inst = InverseInstance::new(qv(&["1", "0", "0"]), q("5"), banzhaf(3)).unwrap();
        assert!(matches!(
            iterative_banzhaf_heuristic(&inst, 4, &q("1"), 20),
            Err(Error::ZeroSemivalue { player: 0 })
        ));
    }

    #[test]
    fn uniqueness_identical_games() {
        let f = game(&["1/3", "1/3", "1/3"], "0");
        let r = uniqueness_check(&f, &f, &banzhaf(3), 20).unwrap();
        assert!(r.holds());
        assert_eq!(r.points_checked, 8);
    }

    #[test]
    fn uniqueness_same_function_different_weights() {
        let f = game(&["2/5", "3/10", "3/10"], "0");
        let g = game(&["1/3", "1/3", "1/3"], "0");
        let r = uniqueness_check(&f, &g, &banzhaf(3), 20).unwrap();
        assert!(r.semivalues_equal);
        assert!(r.violations.is_empty());
        assert!(r.points_checked > 0);
    }

    #[test]
    fn uniqueness_hypothesis_not_met() {
        let f = game(&["1", "0", "0"], "0");
        let g = game(&["1/3", "1/3", "1/3"], "0");
        let r = uniqueness_check(&f, &g, &banzhaf(3), 20).unwrap();
        assert!(!r.semivalues_equal);
        assert!(r.violations.is_empty());
        assert!(!r.holds());
    }

    #[test]
    fn uniqueness_preconditions() {
        let f = game(&["1", "1", "1"], "0");
        let g = game(&["1/3", "1/3", "1/3"], "0");
        assert!(matches!(
            uniqueness_check(&f, &g, &banzhaf(3), 20),
            Err(Error::Precondition(_))
        ));
        let h = game(&["1/3", "1/3", "1/3"], "1");
        assert!(matches!(
            uniqueness_check(&g, &h, &banzhaf(3), 20),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn verification_pipeline_on_majority() {
        let maj3 = game(&["1/3", "1/3", "1/3"], "0");
        let p = banzhaf(3);
        let yes = verification_via_inverse(
            &maj3,
            &qv(&["1", "1", "1"]),
            &p,
            |inst| inverse_exact(inst, 1),
            20,
        )
        .unwrap();
        assert!(yes);

        let no = verification_via_inverse(
            &maj3,
            &qv(&["1", "1", "0"]),
            &p,
            |inst| inverse_exact(inst, 1),
            20,
        )
        .unwrap();
        assert!(!no);
    }

    #[test]
    fn verification_matches_direct_verify_on_class_instances() {
        let p = banzhaf(3);
        let games = enumerate_canonical_games(3, 1).unwrap();
        for g in &games {
            let sv = semivalues_bruteforce(g, &p, 20).unwrap();
            let mut targets = sv.values().to_vec();
            // YES instance.
            let direct = verify_semivalues(g, &p, &targets, 20).unwrap();
            let via = verification_via_inverse(
                g,
                &targets,
                &p,
                |inst| inverse_exact(inst, 1),
                20,
            )
            .unwrap();
            assert!(direct && via, "YES mismatch on {g:?}");
            // NO instance.
            targets[0] += Rational::one();
            let direct = verify_semivalues(g, &p, &targets, 20).unwrap();
            let via = verification_via_inverse(
                g,
                &targets,
                &p,
                |inst| inverse_exact(inst, 1),
                20,
            )
            .unwrap();
            assert!(!direct && !via, "NO mismatch on {g:?}");
        }
    }

    #[test]
    fn verification_rejects_negative_weights() {
        let g = game(&["1", "-1", "1"], "0");
        assert!(matches!(
            verification_via_inverse(
                &g,
                &qv(&["1", "1", "1"]),
                &banzhaf(3),
                |inst| inverse_exact(inst, 1),
                20
            ),
            Err(Error::NegativeWeights)
        ));
    }

    #[test]
    fn instance_serde() {
        let inst = InverseInstance::new(qv(&["1", "1", "1"]), q("0"), banzhaf(3)).unwrap();
        let js = serde_json::to_string(&inst).unwrap();
        let back: InverseInstance = serde_json::from_str(&js).unwrap();
        assert_eq!(back, inst);
        // Dimension check applies on the wire too.
        let bad = r#"{"targets":["1","1"],"theta":"0","pvec":{"n":3,"entries":["1/4","1/4","1/4"]}}"#;
        assert!(serde_json::from_str::<InverseInstance>(bad).is_err());
    }

    #[test]
    fn result_serde_shape() {
        let r = InverseResult {
            status: InverseStatus::NoSolutionInClass,
            weights: None,
            distance: None,
            games_examined: 7,
        };
        let js = serde_json::to_string(&r).unwrap();
        assert_eq!(
            js,
            r#"{"status":"no_solution_in_class","weights":null,"distance":null,"games_examined":7}"#
        );
        let back: InverseResult = serde_json::from_str(&js).unwrap();
        assert_eq!(back, r);
    }
}
