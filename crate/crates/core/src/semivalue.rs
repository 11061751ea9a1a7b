use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Assignment, WeightedGame, MAX_PLAYERS};
use crate::pvec::ProbabilityVector;
use crate::rational::{scale_to_integers, Rational};

/// Semivalues of all players, index-aligned with the game's weights.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SemivalueVector {
    values: Vec<Rational>,
}

impl SemivalueVector {
    pub fn new(values: Vec<Rational>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.values[i]
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }
}

/// The two pieces of the half-sum form: per-player correlations `hat` under
/// the unnormalized cube measure, and the player-independent offset `cf`.
/// Each semivalue equals (hat_i + cf) / 2.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ReformulationTerms {
    hat: Vec<Rational>,
    cf: Rational,
}

impl ReformulationTerms {
    pub fn hat(&self) -> &[Rational] {
        &self.hat
    }

    pub fn cf(&self) -> &Rational {
        &self.cf
    }

    pub fn semivalues(&self) -> SemivalueVector {
        let half = Rational::half();
        SemivalueVector::new(
            self.hat
                .iter()
                .map(|h| (h + &self.cf) * &half)
                .collect(),
        )
    }
}

fn check_dims(g: &WeightedGame, p: &ProbabilityVector) -> Result<()> {
    if g.n() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: p.n(),
        });
    }
    Ok(())
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap.min(MAX_PLAYERS) {
        return Err(Error::InstanceTooLarge {
            n,
            cap: cap.min(MAX_PLAYERS),
        });
    }
    Ok(())
}

/// Semivalues straight from the definition: each cube point x contributes
/// f(x) x_i weighted by p at the size of the coalition player i joins
/// (wt(x) when x_i = -1, wt(x) - 1 when x_i = +1).
///
/// Enumerates all 2^n points; refuses n beyond `cap`. Game values are
/// computed over scaled integers and bucketed by weight class, so only
/// O(n^2) rational operations remain at the end.
pub fn semivalues_bruteforce(
    g: &WeightedGame,
    p: &ProbabilityVector,
    cap: usize,
) -> Result<SemivalueVector> {
    check_dims(g, p)?;
    let n = g.n();
    check_cap(n, cap)?;
    let scaled = g.scaled();

    // acc[i][t] collects the integer sum of f(x) x_i over points where
    // player i joins a size-t coalition.
    let mut acc = vec![vec![0i64; n]; n];
    for x in Assignment::cube(n) {
        let f: i64 = if scaled.wins(x) { 1 } else { -1 };
        let wt = x.weight();
        for (i, row) in acc.iter_mut().enumerate() {
            if x.sign(i) == 1 {
                row[wt - 1] += f;
            } else {
                row[wt] -= f;
            }
        }
    }

    let values = acc
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(t, c)| p.p(t as isize) * Rational::from(*c))
                .sum()
        })
        .collect();
    Ok(SemivalueVector::new(values))
}

/// Ceiling on dynamic-programming table size, in cells.
const DP_CELL_LIMIT: u128 = 1 << 23;

/// Semivalues via pivot counting: for each player, a knapsack-style table
/// counts coalitions of the other players by size and total weight, and the
/// semivalue is twice the p-weighted number of coalitions the player tips
/// from losing to winning.
///
/// Runs in time polynomial in n and the magnitude of the scaled weights, so
/// it handles games far beyond the enumeration cap, but rejects instances
/// whose cleared-denominator weights are astronomically large.
pub fn semivalues_pivot_dp(g: &WeightedGame, p: &ProbabilityVector) -> Result<SemivalueVector> {
    check_dims(g, p)?;
    let n = g.n();

    let mut all: Vec<Rational> = g.weights().to_vec();
    all.push(g.theta().clone());
    let (ints, _) = scale_to_integers(&all);
    let theta_big = ints.last().unwrap().clone();

    let span: u128 = ints[..n]
        .iter()
        .map(|w| {
            w.to_i64()
                .map(|v| v.unsigned_abs() as u128)
                .unwrap_or(u128::MAX / (2 * n as u128 + 2))
        })
        .sum::<u128>()
        + 1;
    let cells = span.saturating_mul(n as u128).saturating_mul(n as u128);
    if cells > DP_CELL_LIMIT {
        return Err(Error::WeightRangeOverflow {
            cells,
            limit: DP_CELL_LIMIT,
        });
    }
    let ws: Vec<i64> = ints[..n].iter().map(|w| w.to_i64().unwrap()).collect();
    let w_total: i128 = ws.iter().map(|&w| w as i128).sum();

    let theta = match theta_big.to_i128() {
        Some(t) => t,
        // A quota beyond i128 dwarfs every achievable dot product, making
        // the game constant and every semivalue zero.
        None => return Ok(SemivalueVector::new(vec![Rational::zero(); n])),
    };
    let wins = |s: i128| 2 * s - w_total >= theta;

    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let others: Vec<i64> = (0..n).filter(|&j| j != i).map(|j| ws[j]).collect();
        let neg: i64 = others.iter().map(|&w| w.min(0)).sum();
        let pos: i64 = others.iter().map(|&w| w.max(0)).sum();
        let width = (pos - neg + 1) as usize;
        let m = others.len();

        // dp[t][s - neg] counts size-t subsets of the others with weight s.
        let mut dp = vec![vec![0u64; width]; m + 1];
        dp[0][(-neg) as usize] = 1;
        for (taken, &w) in others.iter().enumerate() {
            for t in (1..=taken + 1).rev() {
                for idx in 0..width {
                    let c = dp[t - 1][idx];
                    if c != 0 {
                        dp[t][(idx as i64 + w) as usize] += c;
                    }
                }
            }
        }

        let mut value = Rational::zero();
        for (t, row) in dp.iter().enumerate() {
            if p.p(t as isize).is_zero() {
                continue;
            }
            let mut pivots = 0i128;
            for (idx, &c) in row.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let s = idx as i128 + neg as i128;
                let diff = wins(s + ws[i] as i128) as i128 - wins(s) as i128;
                pivots += diff * c as i128;
            }
            if pivots != 0 {
                value += p.p(t as isize) * Rational::from(BigInt::from(pivots));
            }
        }
        values.push(Rational::from(2) * value);
    }
    Ok(SemivalueVector::new(values))
}

/// Computes the half-sum decomposition by cube enumeration.
pub fn reformulation_terms(
    g: &WeightedGame,
    p: &ProbabilityVector,
    cap: usize,
) -> Result<ReformulationTerms> {
    check_dims(g, p)?;
    let n = g.n();
    check_cap(n, cap)?;
    let scaled = g.scaled();

    let mut hat_acc = vec![vec![0i64; n + 1]; n];
    let mut cf_acc = vec![0i64; n + 1];
    for x in Assignment::cube(n) {
        let f: i64 = if scaled.wins(x) { 1 } else { -1 };
        let wt = x.weight();
        cf_acc[wt] += f;
        for (i, row) in hat_acc.iter_mut().enumerate() {
            row[wt] += f * x.sign(i);
        }
    }

    let hat = hat_acc
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(wt, c)| p.mu_prime_for_weight(wt) * Rational::from(*c))
                .sum()
        })
        .collect();
    let cf = cf_acc
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(wt, c)| {
            (p.p(wt as isize - 1) - p.p(wt as isize)) * Rational::from(*c)
        })
        .sum();
    Ok(ReformulationTerms { hat, cf })
}

/// Decides whether `targets` is exactly the semivalue vector of `g` under
/// `p`. Only nonnegative-weight games are accepted; this is the decision
/// problem the solvers downstream treat as the hard direction.
pub fn verify_semivalues(
    g: &WeightedGame,
    p: &ProbabilityVector,
    targets: &[Rational],
    cap: usize,
) -> Result<bool> {
    if !g.has_nonnegative_weights() {
        return Err(Error::NegativeWeights);
    }
    if targets.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: targets.len(),
        });
    }
    let got = semivalues_bruteforce(g, p, cap)?;
    Ok(got.values() == targets)
}
