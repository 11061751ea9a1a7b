use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::game::{Assignment, WeightedGame};
use crate::inverse::{
    enumerate_canonical_games, inverse_exact, uniqueness_check, verification_via_inverse,
    InverseInstance, InverseStatus,
};
use crate::khintchine::{khintchine, partition_probability, KhintchineMethod};
use crate::polytope::{optimize_over_polytope, OptimizeMode};
use crate::pvec::{InducedDistribution, ProbabilityVector};
use crate::rational::Rational;
use crate::reduction::{
    build_khintchine_triple, check_pton_identities, check_rpartition_promise,
    check_triple_identities, pton_transform, run_rpartition_pipeline,
};
use crate::sample::{
    random_int_game, random_pvec, random_regular_pvec, random_rpartition_instance,
    random_special_form,
};
use crate::semivalue::{
    reformulation_terms, semivalues_bruteforce, semivalues_pivot_dp, verify_semivalues,
};

/// Default enumeration cap for the self-test suite.
pub const DEFAULT_SELFTEST_CAP: usize = 6;

#[derive(Clone, Copy, Debug)]
pub struct SelftestConfig {
    /// Largest player count any invariant may enumerate over.
    pub cap: usize,
    /// Seed for the per-invariant generators; same seed, same report.
    pub seed: u64,
    /// Random draws per invariant.
    pub trials: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            cap: DEFAULT_SELFTEST_CAP,
            seed: 7,
            trials: 8,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct InvariantOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SelftestReport {
    pub outcomes: Vec<InvariantOutcome>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> Vec<&InvariantOutcome> {
        self.outcomes.iter().filter(|o| !o.passed).collect()
    }
}

struct CheckFail(String);

impl From<Error> for CheckFail {
    fn from(e: Error) -> Self {
        CheckFail(e.to_string())
    }
}

impl From<String> for CheckFail {
    fn from(s: String) -> Self {
        CheckFail(s)
    }
}

type CheckResult = std::result::Result<String, CheckFail>;
type Check = fn(&mut ChaCha8Rng, &SelftestConfig) -> CheckResult;

const CHECKS: &[(&str, Check)] = &[
    ("mu-prime-total-is-lambda", mu_prime_total_is_lambda),
    ("mu-is-a-distribution", mu_is_a_distribution),
    ("eval-positive-scale-invariance", eval_positive_scale_invariance),
    ("presets-satisfy-normalization", presets_satisfy_normalization),
    ("semivalue-routes-agree", semivalue_routes_agree),
    ("semivalue-symmetry", semivalue_symmetry),
    ("null-player-and-dictator", null_player_and_dictator),
    ("reformulation-identity", reformulation_identity),
    ("semivalue-scale-invariance", semivalue_scale_invariance),
    ("khintchine-routes-agree", khintchine_routes_agree),
    ("khintchine-sign-invariance", khintchine_sign_invariance),
    ("khintchine-permutation-invariance", khintchine_permutation_invariance),
    ("khintchine-triangle-inequality", khintchine_triangle_inequality),
    ("rpartition-pipeline-count", rpartition_pipeline_count),
    ("triple-pointwise-cases", triple_pointwise_cases),
    ("triple-aggregate-identity", triple_aggregate_identity),
    ("optimize-tightness", optimize_tightness),
    ("pton-yes-no-preservation", pton_yes_no_preservation),
    ("inverse-found-reverifies", inverse_found_reverifies),
    ("uniqueness-desk-scale", uniqueness_desk_scale),
    ("verification-via-inverse-agrees", verification_via_inverse_agrees),
    ("tie-convention-sensitivity", tie_convention_sensitivity),
];

/// Runs every registered invariant. Each invariant draws from its own
/// seeded generator, so reports are reproducible and independent of `jobs`
/// (the worker count used to spread invariants across threads).
pub fn run_selftest(config: &SelftestConfig, jobs: usize) -> SelftestReport {
    let run_one = |idx: usize| -> InvariantOutcome {
        let (name, check) = CHECKS[idx];
        let mut rng = ChaCha8Rng::seed_from_u64(
            config
                .seed
                .wrapping_add((idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        match check(&mut rng, config) {
            Ok(detail) => InvariantOutcome {
                name: name.to_string(),
                passed: true,
                detail,
            },
            Err(CheckFail(detail)) => InvariantOutcome {
                name: name.to_string(),
                passed: false,
                detail,
            },
        }
    };

    let outcomes = if jobs <= 1 {
        (0..CHECKS.len()).map(run_one).collect()
    } else {
        let mut slots: Vec<Option<InvariantOutcome>> = vec![None; CHECKS.len()];
        std::thread::scope(|scope| {
            let chunks: Vec<Vec<usize>> = (0..jobs)
                .map(|j| (j..CHECKS.len()).step_by(jobs).collect())
                .collect();
            let handles: Vec<_> = chunks
                .into_iter()
                .map(|idxs| {
                    scope.spawn(move || {
                        idxs.into_iter()
                            .map(|i| (i, run_one(i)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, outcome) in h.join().expect("selftest worker panicked") {
                    slots[i] = Some(outcome);
                }
            }
        });
        slots.into_iter().map(|s| s.expect("missing outcome")).collect()
    };
    SelftestReport { outcomes }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), CheckFail> {
    if cond {
        Ok(())
    } else {
        Err(CheckFail(msg()))
    }
}

fn small_n(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> usize {
    rng.random_range(1..=config.cap.max(1))
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let numer = rng.random_range(1..=5i64);
    let denom = rng.random_range(1..=5i64);
    Rational::new(numer, denom).expect("positive denominator")
}

fn mu_prime_total_is_lambda(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    for _ in 0..config.trials {
        let n = small_n(rng, config);
        let p = random_pvec(rng, n, true)?;
        let mut total = Rational::zero();
        for x in Assignment::cube(n) {
            total += p.mu_prime(&x)?;
        }
        ensure(total == p.lambda(), || {
            format!("sum of mu' = {total} but lambda = {} at n = {n}", p.lambda())
        })?;
    }
    Ok(format!("{} random vectors", config.trials))
}

fn mu_is_a_distribution(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    for _ in 0..config.trials {
        let n = small_n(rng, config);
        let mu = InducedDistribution::new(random_pvec(rng, n, true)?);
        let mut total = Rational::zero();
        for x in Assignment::cube(n) {
            let m = mu.mu(&x)?;
            ensure(!m.is_negative(), || format!("mu({x:?}) = {m} is negative"))?;
            total += m;
        }
        ensure(total.is_one(), || format!("mu sums to {total} at n = {n}"))?;
    }
    Ok(format!("{} random vectors", config.trials))
}

fn eval_positive_scale_invariance(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    for _ in 0..config.trials {
        let n = small_n(rng, config);
        let g = random_int_game(rng, n, 5, false)?;
        let c = random_rational(rng);
        let scaled = WeightedGame::new(
            g.weights().iter().map(|w| w * &c).collect(),
            g.theta() * &c,
        )?;
        for x in Assignment::cube(n) {
            ensure(g.eval(&x)? == scaled.eval(&x)?, || {
                format!("scaling by {c} changed the outcome at {x:?} for {g:?}")
            })?;
        }
    }
    Ok(format!("{} games, exhaustive points", config.trials))
}

fn presets_satisfy_normalization(_: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    for n in 1..=config.cap.max(1) {
        for p in [ProbabilityVector::banzhaf(n)?, ProbabilityVector::shapley(n)?] {
            // Re-validate through the constructor.
            ProbabilityVector::new(p.entries().to_vec())?;
        }
    }
    Ok(format!("both presets, n = 1..={}", config.cap))
}

fn semivalue_routes_agree(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    for _ in 0..config.trials {
        let n = small_n(rng, config);
        let g = random_int_game(rng, n, 20, false)?;
        let p = random_pvec(rng, n, true)?;
        let brute = semivalues_bruteforce(&g, &p, config.cap)?;
        let dp = semivalues_pivot_dp(&g, &p)?;
        ensure(brute == dp, || format!("routes disagree on {g:?}"))?;
    }
    Ok(format!("{} random games", config.trials))
}

fn semivalue_symmetry(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    for _ in 0..config.trials {
        let n = rng.random_range(2..=config.cap.max(2));
        let g = random_int_game(rng, n, 5, false)?;
        let i = rng.random_range(0..n);
        let j = (i + 1 + rng.random_range(0..n - 1)) % n;
        let mut w = g.weights().to_vec();
        w[j] = w[i].clone();
        let g = WeightedGame::new(w, g.theta().clone())?;
        let p = random_pvec(rng, n, true)?;
        let sv = semivalues_bruteforce(&g, &p, config.cap)?;
        ensure(sv.get(i) == sv.get(j), || {
            format!("players {i} and {j} share weight but split values on {g:?}")
        })?;
    }
    Ok(format!("{} duplicated-weight games", config.trials))
}

fn null_player_and_dictator(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    for _ in 0..config.trials {
        let n = rng.random_range(2..=config.cap.max(2));
        let p = random_pvec(rng, n, true)?;

        let mut g = random_int_game(rng, n, 5, false)?;
        let i = rng.random_range(0..n);
        let mut w = g.weights().to_vec();
        w[i] = Rational::zero();
        g = WeightedGame::new(w, g.theta().clone())?;
        let sv = semivalues_bruteforce(&g, &p, config.cap)?;
        ensure(sv.get(i).is_zero(), || {
            format!("null player {i} got value {} on {g:?}", sv.get(i))
        })?;

        let mut w = vec![Rational::zero(); n];
        w[0] = Rational::from(2);
        let dictator = WeightedGame::new(w, Rational::one())?;
        let sv = semivalues_bruteforce(&dictator, &p, config.cap)?;
        ensure(sv.get(0) == &Rational::from(2), || {
            format!("dictator value {} under p = {p:?}", sv.get(0))
        })?;
        ensure((1..n).all(|j| sv.get(j).is_zero()), || {
            "dictator left nonzero residue".to_string()
        })?;
    }
    Ok(format!("{} draws", config.trials))
}

fn reformulation_identity(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    for _ in 0..config.trials {
        let n = small_n(rng, config);
        let g = random_int_game(rng, n, 10, false)?;
        let p = random_pvec(rng, n, true)?;
        let direct = semivalues_bruteforce(&g, &p, config.cap)?;
        let via_terms = reformulation_terms(&g, &p, config.cap)?.semivalues();
        ensure(direct == via_terms, || {
            format!("reformulation disagrees on {g:?}")
        })?;
    }
    Ok(format!("{} random games", config.trials))
}

fn semivalue_scale_invariance(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    for _ in 0..config.trials {
        let n = small_n(rng, config);
        let g = random_int_game(rng, n, 5, false)?;
        let c = random_rational(rng);
        let scaled = WeightedGame::new(
            g.weights().iter().map(|w| w * &c).collect(),
            g.theta() * &c,
        )?;
        let p = random_pvec(rng, n, true)?;
        ensure(
            semivalues_bruteforce(&g, &p, config.cap)?
                == semivalues_bruteforce(&scaled, &p, config.cap)?,
            || format!("scaling by {c} moved semivalues of {g:?}"),
        )?;
    }
    Ok(format!("{} games", config.trials))
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n)
        .map(|_| {
            let numer = rng.random_range(-20..=20i64);
            let denom = [1, 2, 4][rng.random_range(0..3usize)];
            Rational::new(numer, denom).expect("positive denominator")
        })
        .collect()
}

fn khintchine_routes_agree(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    for _ in 0..config.trials {
        let n = small_n(rng, config);
        let a = random_vector(rng, n);
        let p = random_pvec(rng, n, true)?;
        let brute = khintchine(&a, &p, KhintchineMethod::Brute, config.cap)?;
        let dp = khintchine(&a, &p, KhintchineMethod::Dp, config.cap)?;
        ensure(brute.value == dp.value, || {
            format!("K routes disagree on {a:?}")
        })?;
    }
    Ok(format!("{} random vectors", config.trials))
}

fn khintchine_sign_invariance(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    for _ in 0..config.trials {
        let n = small_n(rng, config);
        let a = random_vector(rng, n);
        let neg: Vec<Rational> = a.iter().map(|v| -v).collect();
        let p = random_pvec(rng, n, true)?;
        let ka = khintchine(&a, &p, KhintchineMethod::Dp, config.cap)?.value;
        let kn = khintchine(&neg, &p, KhintchineMethod::Dp, config.cap)?.value;
        ensure(ka == kn, || format!("K({a:?}) != K(-a)"))?;
        ensure(
            partition_probability(&a, &p)? == partition_probability(&neg, &p)?,
            || format!("zero mass moved under negation of {a:?}"),
        )?;
    }
    Ok(format!("{} random vectors", config.trials))
}

fn khintchine_permutation_invariance(
    rng: &mut ChaCha8Rng,
    config: &SelftestConfig,
) -> CheckResult {
    for _ in 0..config.trials {
        let n = small_n(rng, config);
        let a = random_vector(rng, n);
        let mut shuffled = a.clone();
        for i in (1..n).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        let p = random_pvec(rng, n, true)?;
        let ka = khintchine(&a, &p, KhintchineMethod::Dp, config.cap)?.value;
        let ks = khintchine(&shuffled, &p, KhintchineMethod::Dp, config.cap)?.value;
        ensure(ka == ks, || format!("K changed under permutation of {a:?}"))?;
    }
    Ok(format!("{} random vectors", config.trials))
}

fn khintchine_triangle_inequality(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    for _ in 0..config.trials {
        let n = small_n(rng, config);
        let a = random_vector(rng, n);
        let b = random_vector(rng, n);
        let sum: Vec<Rational> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let p = random_pvec(rng, n, true)?;
        let ka = khintchine(&a, &p, KhintchineMethod::Dp, config.cap)?.value;
        let kb = khintchine(&b, &p, KhintchineMethod::Dp, config.cap)?.value;
        let ks = khintchine(&sum, &p, KhintchineMethod::Dp, config.cap)?.value;
        ensure(ks <= &ka + &kb, || {
            format!("triangle inequality fails for {a:?} + {b:?}")
        })?;
    }
    Ok(format!("{} random pairs", config.trials))
}

fn rpartition_pipeline_count(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    let mut verified = 0;
    for _ in 0..config.trials {
        let n = rng.random_range(2..=config.cap.max(2));
        let inst = match (0..50)
            .filter_map(|_| random_rpartition_instance(rng, n, 6).ok())
            .find(|inst| {
                check_rpartition_promise(inst, config.cap)
                    .map(|r| r.holds)
                    .unwrap_or(false)
            }) {
            Some(inst) => inst,
            None => continue,
        };
        let m = inst.n() + 2;
        for p in [
            ProbabilityVector::banzhaf(m)?,
            ProbabilityVector::shapley(m)?,
            random_regular_pvec(rng, m)?,
        ] {
            let run = run_rpartition_pipeline(&inst, &p, config.cap)?;
            ensure(run.recovered == Rational::from(run.promise.count), || {
                format!(
                    "pipeline recovered {} but counted {} on {inst:?}",
                    run.recovered, run.promise.count
                )
            })?;
            verified += 1;
        }
    }
    ensure(verified > 0, || "no promise-satisfying instances drawn".into())?;
    Ok(format!("{verified} pipeline runs"))
}

fn triple_for(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> (Vec<Rational>, usize) {
    let n = rng.random_range(1..=config.cap.max(3).saturating_sub(2));
    (random_special_form(rng, n, 6), n)
}

fn triple_pointwise_cases(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    for _ in 0..config.trials {
        let (a, n) = triple_for(rng, config);
        let t = build_khintchine_triple(&a, &Rational::new(1, 4)?)?;
        let p = random_pvec(rng, n + 2, true)?;
        let checks = check_triple_identities(&t, &p, config.cap)?;
        ensure(checks.pointwise, || {
            format!("pointwise case split fails for {a:?}")
        })?;
    }
    Ok(format!("{} random triples", config.trials))
}

fn triple_aggregate_identity(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    for _ in 0..config.trials {
        let (a, n) = triple_for(rng, config);
        let t = build_khintchine_triple(&a, &Rational::new(1, 4)?)?;
        let p = random_pvec(rng, n + 2, true)?;
        let checks = check_triple_identities(&t, &p, config.cap)?;
        ensure(checks.aggregate, || format!("aggregate identity fails for {a:?}"))?;
        ensure(checks.partition_match, || {
            format!("recovery disagrees with the direct zero mass for {a:?}")
        })?;
    }
    Ok(format!("{} random triples", config.trials))
}

fn optimize_tightness(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    for _ in 0..config.trials {
        let n = rng.random_range(1..=config.cap.max(3).saturating_sub(2).min(4));
        let a = random_special_form(rng, n, 2);
        let p = random_pvec(rng, n + 2, true)?;
        let closed = optimize_over_polytope(&a, &p, OptimizeMode::ClosedForm, 2, config.cap)?;
        let scanned = optimize_over_polytope(&a, &p, OptimizeMode::VertexEnum, 2, config.cap)?;
        ensure(closed.value == scanned.value, || {
            format!("closed form {} vs scan {} on {a:?}", closed.value, scanned.value)
        })?;
        let sv = semivalues_bruteforce(&closed.witness, &p, config.cap)?;
        let attained: Rational = a.iter().zip(sv.values()).map(|(x, y)| x * y).sum();
        ensure(attained == closed.value, || {
            format!("witness attains {attained}, optimum {}", closed.value)
        })?;
    }
    Ok(format!("{} random objectives", config.trials))
}

fn pton_yes_no_preservation(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    for _ in 0..config.trials {
        let (a, n) = triple_for(rng, config);
        let p = random_pvec(rng, n + 2, true)?;
        ensure(check_pton_identities(&a, &p, config.cap)?, || {
            format!("transfer identities fail for {a:?}")
        })?;

        let f = WeightedGame::new(a.clone(), Rational::zero())?;
        let yes = semivalues_bruteforce(&f, &p, config.cap)?.into_values();
        let out = pton_transform(&a, &yes, &p)?;
        let g = WeightedGame::new(out.weights.clone(), out.theta.clone())?;
        let got = semivalues_bruteforce(&g, &p, config.cap)?.into_values();
        ensure(got == out.targets, || format!("YES not preserved for {a:?}"))?;

        let mut no = yes;
        no[rng.random_range(0..n + 2)] += Rational::one();
        let out = pton_transform(&a, &no, &p)?;
        ensure(got != out.targets, || format!("NO not preserved for {a:?}"))?;
    }
    Ok(format!("{} random instances", config.trials))
}

fn inverse_found_reverifies(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    let n = config.cap.clamp(1, 3);
    let bound = 1;
    let games = enumerate_canonical_games(n, bound)?;
    let p = ProbabilityVector::banzhaf(n)?;
    for _ in 0..config.trials {
        let g = &games[rng.random_range(0..games.len())];
        let targets = semivalues_bruteforce(g, &p, config.cap)?.into_values();
        let theta = g.theta() / g.total_weight();
        let inst = InverseInstance::new(targets.clone(), theta, p.clone())?;
        let r = inverse_exact(&inst, bound)?;
        ensure(r.status == InverseStatus::Found, || {
            format!("no match for the semivalues of {g:?}")
        })?;
        let w = r.weights.expect("found without weights");
        let total: Rational = w.iter().sum();
        ensure(total.is_one(), || format!("weights {w:?} are not normalized"))?;
        let solved = WeightedGame::new(w, inst.theta().clone())?;
        ensure(
            verify_semivalues(&solved, &p, &targets, config.cap)?,
            || format!("found weights fail verification for {g:?}"),
        )?;
    }
    Ok(format!("{} instances at n = {n}", config.trials))
}

fn uniqueness_desk_scale(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    let n = config.cap.clamp(2, 4);
    let games = enumerate_canonical_games(n, 2)?;
    let ps = [ProbabilityVector::banzhaf(n)?, random_pvec(rng, n, true)?];
    let mut pairs_checked = 0u64;
    for p in &ps {
        let svs: Vec<_> = games
            .iter()
            .map(|g| semivalues_bruteforce(g, p, config.cap))
            .collect::<crate::error::Result<_>>()?;
        for i in 0..games.len() {
            for j in i + 1..games.len() {
                if games[i].total_weight() != games[j].total_weight()
                    || games[i].theta() != games[j].theta()
                    || svs[i] != svs[j]
                {
                    continue;
                }
                pairs_checked += 1;
                let report = uniqueness_check(&games[i], &games[j], p, config.cap)?;
                ensure(report.holds(), || {
                    format!(
                        "games {:?} and {:?} share semivalues but split at {:?}",
                        games[i], games[j], report.violations
                    )
                })?;
            }
        }
    }
    Ok(format!("{pairs_checked} equal-semivalue pairs at n = {n}"))
}

fn verification_via_inverse_agrees(rng: &mut ChaCha8Rng, config: &SelftestConfig) -> CheckResult {
    let n = config.cap.clamp(1, 3);
    let bound = 1;
    let games = enumerate_canonical_games(n, bound)?;
    let p = ProbabilityVector::banzhaf(n)?;
    for _ in 0..config.trials {
        let g = &games[rng.random_range(0..games.len())];
        let mut targets = semivalues_bruteforce(g, &p, config.cap)?.into_values();
        if rng.random_range(0..2) == 1 {
            targets[rng.random_range(0..n)] += Rational::one();
        }
        let direct = verify_semivalues(g, &p, &targets, config.cap)?;
        let via = verification_via_inverse(
            g,
            &targets,
            &p,
            |inst| inverse_exact(inst, bound),
            config.cap,
        )?;
        ensure(direct == via, || {
            format!("direct {direct} vs inverse-backed {via} on {g:?}")
        })?;
    }
    Ok(format!("{} instances at n = {n}", config.trials))
}

/// Evaluates semivalues straight from the definition with a configurable
/// tie rule, to prove the suite notices a sign(0) = -1 mutation.
fn definition_semivalues(
    w: &[Rational],
    theta: &Rational,
    p: &ProbabilityVector,
    tie_wins: bool,
) -> Vec<Rational> {
    let n = w.len();
    let mut sv = vec![Rational::zero(); n];
    for x in Assignment::cube(n) {
        let dot: Rational = w
            .iter()
            .enumerate()
            .map(|(i, wi)| if x.sign(i) == 1 { wi.clone() } else { -wi })
            .sum();
        let diff = dot - theta;
        let win = diff.is_positive() || (diff.is_zero() && tie_wins);
        let f = if win { Rational::one() } else { -Rational::one() };
        let wt = x.weight() as isize;
        for (i, s) in sv.iter_mut().enumerate() {
            if x.sign(i) == 1 {
                *s += p.p(wt - 1) * &f;
            } else {
                *s -= p.p(wt) * &f;
            }
        }
    }
    sv
}

fn tie_convention_sensitivity(_: &mut ChaCha8Rng, _: &SelftestConfig) -> CheckResult {
    let q = |s: &str| -> Rational { s.parse().expect("literal") };

    // Boundary fixed point: (2,1,1; theta = 2) under the Shapley vector.
    let w = vec![q("2"), q("1"), q("1")];
    let p = ProbabilityVector::shapley(3)?;
    let frozen = vec![q("4/3"), q("1/3"), q("1/3")];
    let normal = definition_semivalues(&w, &q("2"), &p, true);
    let mutated = definition_semivalues(&w, &q("2"), &p, false);
    ensure(normal == frozen, || {
        format!("tie-wins evaluation drifted to {normal:?}")
    })?;
    ensure(mutated != frozen, || {
        "tie-loses mutation slipped past the boundary fixed point".to_string()
    })?;

    // Transfer identity under an asymmetric vector: holds for tie-wins,
    // breaks for tie-loses.
    let a = vec![q("1"), q("1"), q("-1"), q("-1")];
    let pos = vec![q("1"), q("1"), q("1"), q("1")];
    let p4 = ProbabilityVector::new(vec![q("1/2"), q("1/6"), q("0"), q("0")])?;
    let head = -(q("2") * (p4.p(3) - p4.p(1)));
    let tail = q("2") * ((p4.p(0) + p4.p(1)) + q("2") * (p4.p(1) + p4.p(2)));
    let identity = |tie: bool| {
        let sf = definition_semivalues(&a, &Rational::zero(), &p4, tie);
        let sg = definition_semivalues(&pos, &Rational::zero(), &p4, tie);
        (0..4).all(|i| {
            let shift = if i < 2 { &head } else { &tail };
            sg[i] == &sf[i] + shift
        })
    };
    ensure(identity(true), || {
        "transfer identity fails under the correct convention".to_string()
    })?;
    ensure(!identity(false), || {
        "tie-loses mutation slipped past the transfer identity".to_string()
    })?;
    Ok("mutation detected by fixed point and transfer identity".to_string())
}
