use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{truth_table, WeightedGame};
use crate::khintchine::{khintchine, KhintchineMethod};
use crate::pvec::ProbabilityVector;
use crate::rational::Rational;
use crate::reduction::check_special_form;
use crate::semivalue::semivalues_bruteforce;

/// Players allowed in vertex enumeration; the candidate count grows as
/// bound^n so this stays tiny.
pub const VERTEX_ENUM_MAX_PLAYERS: usize = 8;

/// Default head-coordinate bound for vertex enumeration.
pub const DEFAULT_VERTEX_BOUND: u64 = 3;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizeMode {
    /// Exact optimum via the identity max a·c = (Lambda/2) K(a).
    ClosedForm,
    /// Cross-check: scan integer special-form games up to a bound. The scan
    /// is a sound but incomplete vertex sample, so its maximum can only
    /// fall below the closed form, never above.
    VertexEnum,
}

impl std::fmt::Display for OptimizeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OptimizeMode::ClosedForm => write!(f, "closed_form"),
            OptimizeMode::VertexEnum => write!(f, "vertex_enum"),
        }
    }
}

/// Optimum of a·c over semivalue vectors c of special-form games, with a
/// game attaining it.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct OptimizeOutcome {
    pub value: Rational,
    pub witness: WeightedGame,
}

/// Maximizes the linear functional a·c over the polytope of semivalue
/// vectors. For zero-sum a the constant term drops out of the semivalue
/// reformulation, so a·c = (1/2) E[sgn-weighted dot] is maximized by the
/// game sign(a·x) and the optimum is (Lambda/2) K(a).
pub fn optimize_over_polytope(
    a: &[Rational],
    p: &ProbabilityVector,
    mode: OptimizeMode,
    bound: u64,
    cap: usize,
) -> Result<OptimizeOutcome> {
    let n = check_special_form(a)?;
    let m = n + 2;
    if p.n() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: p.n(),
        });
    }
    match mode {
        OptimizeMode::ClosedForm => {
            let k = khintchine(a, p, KhintchineMethod::Dp, cap)?.value;
            let value = p.lambda() * Rational::half() * k;
            let witness = WeightedGame::new(a.to_vec(), Rational::zero())?;
            Ok(OptimizeOutcome { value, witness })
        }
        OptimizeMode::VertexEnum => {
            if m > VERTEX_ENUM_MAX_PLAYERS {
                return Err(Error::InstanceTooLarge {
                    n: m,
                    cap: VERTEX_ENUM_MAX_PLAYERS,
                });
            }
            if bound == 0 {
                return Err(Error::Precondition(
                    "vertex enumeration bound must be positive".into(),
                ));
            }
            let mut best: Option<OptimizeOutcome> = None;
            let mut seen: HashSet<Vec<u64>> = HashSet::new();
            let mut heads = vec![1u64; n];
            loop {
                let game = special_form_game(&heads)?;
                if seen.insert(truth_table(&game)) {
                    let sv = semivalues_bruteforce(&game, p, cap)?;
                    let value: Rational = a
                        .iter()
                        .zip(sv.values())
                        .map(|(ai, ci)| ai * ci)
                        .sum();
                    // Strict improvement only, so ties keep the first
                    // (lexicographically smallest) witness.
                    if best.as_ref().is_none_or(|b| value > b.value) {
                        best = Some(OptimizeOutcome {
                            value,
                            witness: game,
                        });
                    }
                }
                if !increment(&mut heads, bound) {
                    break;
                }
            }
            Ok(best.expect("at least one head vector enumerated"))
        }
    }
}

/// Builds the game ((h_1..h_n, -H/2, -H/2), theta = 0).
fn special_form_game(heads: &[u64]) -> Result<WeightedGame> {
    let total: u64 = heads.iter().sum();
    let tail = -(Rational::from(total) * Rational::half());
    let mut w: Vec<Rational> = heads.iter().map(|&h| Rational::from(h)).collect();
    w.push(tail.clone());
    w.push(tail);
    WeightedGame::new(w, Rational::zero())
}

/// Advances a base-`bound` counter over [1, bound]^n; false on wraparound.
fn increment(heads: &mut [u64], bound: u64) -> bool {
    for h in heads.iter_mut() {
        if *h < bound {
            *h += 1;
            return true;
        }
        *h = 1;
    }
    false
}

/// A convex-combination witness that `point` lies in the semivalue
/// polytope: at most n+3 vertices, each realized by a special-form game.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CaratheodoryCertificate {
    pub point: Vec<Rational>,
    pub vertices: Vec<Vec<Rational>>,
    pub witnesses: Vec<WeightedGame>,
    pub lambdas: Vec<Rational>,
}

/// Checks a certificate end to end. Structural problems (lengths, witness
/// shape) are errors; a well-formed certificate that simply fails to prove
/// membership returns Ok(false).
pub fn verify_membership_certificate(
    cert: &CaratheodoryCertificate,
    p: &ProbabilityVector,
    cap: usize,
) -> Result<bool> {
    let dim = p.n();
    if cert.point.len() != dim {
        return Err(Error::ArityMismatch {
            what: "point",
            expected: dim,
            got: cert.point.len(),
        });
    }
    if dim < 3 {
        return Err(Error::NotSpecialForm(format!(
            "certificates need n + 2 >= 3 coordinates, got {dim}"
        )));
    }
    let n = dim - 2;
    let m = cert.witnesses.len();
    if m == 0 || m > n + 3 {
        return Err(Error::ArityMismatch {
            what: "witnesses",
            expected: n + 3,
            got: m,
        });
    }
    if cert.vertices.len() != m {
        return Err(Error::ArityMismatch {
            what: "vertices",
            expected: m,
            got: cert.vertices.len(),
        });
    }
    if cert.lambdas.len() != m {
        return Err(Error::ArityMismatch {
            what: "lambdas",
            expected: m,
            got: cert.lambdas.len(),
        });
    }
    for v in &cert.vertices {
        if v.len() != dim {
            return Err(Error::ArityMismatch {
                what: "vertex entries",
                expected: dim,
                got: v.len(),
            });
        }
    }
    for g in &cert.witnesses {
        if g.n() != dim {
            return Err(Error::ArityMismatch {
                what: "witness weights",
                expected: dim,
                got: g.n(),
            });
        }
        if !g.theta().is_zero() {
            return Err(Error::NotSpecialForm(format!(
                "witness threshold {} must be 0",
                g.theta()
            )));
        }
        check_special_form(g.weights())?;
    }

    // Claimed vertices must be the witnesses' exact semivalue vectors.
    for (g, v) in cert.witnesses.iter().zip(&cert.vertices) {
        let sv = semivalues_bruteforce(g, p, cap)?;
        if sv.values() != &v[..] {
            return Ok(false);
        }
    }

    if cert.lambdas.iter().any(Rational::is_negative) {
        return Ok(false);
    }
    if !(cert.lambdas.iter().sum::<Rational>() - Rational::one()).is_zero() {
        return Ok(false);
    }
    for i in 0..dim {
        let mixed: Rational = cert
            .lambdas
            .iter()
            .zip(&cert.vertices)
            .map(|(l, v)| l * &v[i])
            .sum();
        if mixed != cert.point[i] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Assembles a certificate from games and mixture weights by computing the
/// exact vertex vectors and their convex combination.
pub fn make_membership_certificate(
    witnesses: Vec<WeightedGame>,
    lambdas: Vec<Rational>,
    p: &ProbabilityVector,
    cap: usize,
) -> Result<CaratheodoryCertificate> {
    if witnesses.is_empty() || witnesses.len() != lambdas.len() {
        return Err(Error::ArityMismatch {
            what: "lambdas",
            expected: witnesses.len(),
            got: lambdas.len(),
        });
    }
    let dim = p.n();
    let mut vertices = Vec::with_capacity(witnesses.len());
    for g in &witnesses {
        vertices.push(semivalues_bruteforce(g, p, cap)?.into_values());
    }
    let point = (0..dim)
        .map(|i| lambdas.iter().zip(&vertices).map(|(l, v)| l * &v[i]).sum())
        .collect();
    Ok(CaratheodoryCertificate {
        point,
        vertices,
        witnesses,
        lambdas,
    })
}
