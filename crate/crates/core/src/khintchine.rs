use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Assignment, MAX_PLAYERS};
use crate::pvec::ProbabilityVector;
use crate::rational::{scale_to_integers, Rational};

/// Ceiling on counting-table size, in cells.
pub(crate) const TABLE_CELL_LIMIT: u128 = 1 << 23;

/// How a Khintchine constant was computed.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KhintchineMethod {
    Brute,
    Dp,
}

impl fmt::Display for KhintchineMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KhintchineMethod::Brute => f.write_str("brute"),
            KhintchineMethod::Dp => f.write_str("dp"),
        }
    }
}

/// K_mu(a) = E_{x ~ mu}[|a·x|], tagged with the route that produced it.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct KhintchineResult {
    pub value: Rational,
    pub method: KhintchineMethod,
}

/// Counts cube points by weight class and dot product against an integer
/// vector: `counts[wt][dot + offset]`.
struct DotCountTable {
    counts: Vec<Vec<u64>>,
    offset: i64,
}

impl DotCountTable {
    fn build(w: &[i64]) -> Result<Self> {
        let n = w.len();
        let span: u128 = w.iter().map(|&v| v.unsigned_abs() as u128).sum();
        let width_u = 2 * span + 1;
        let cells = width_u.saturating_mul(n as u128 + 1);
        if cells > TABLE_CELL_LIMIT {
            return Err(Error::WeightRangeOverflow {
                cells,
                limit: TABLE_CELL_LIMIT,
            });
        }
        let width = width_u as usize;
        let offset = span as i64;

        // Every coordinate takes a side, so each step shifts the whole table
        // by +-w_i; double-buffer instead of updating in place.
        let mut cur = vec![vec![0u64; width]; n + 1];
        cur[0][offset as usize] = 1;
        for &wi in w {
            let mut next = vec![vec![0u64; width]; n + 1];
            for (t, row) in cur.iter().enumerate() {
                for (idx, &c) in row.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    next[t][(idx as i64 - wi) as usize] += c;
                    next[t + 1][(idx as i64 + wi) as usize] += c;
                }
            }
            cur = next;
        }
        Ok(Self {
            counts: cur,
            offset,
        })
    }

    fn dot_of(&self, idx: usize) -> i64 {
        idx as i64 - self.offset
    }
}

fn to_scaled_ints(a: &[Rational]) -> Result<(Vec<i64>, BigInt)> {
    if a.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let (big, scale) = scale_to_integers(a);
    let span: u128 = big
        .iter()
        .map(|v| {
            v.abs()
                .to_u128()
                .unwrap_or(u128::MAX / (a.len() as u128 + 2))
        })
        .fold(0u128, |acc, v| acc.saturating_add(v));
    let cells = (2 * span + 1).saturating_mul(a.len() as u128 + 1);
    if cells > TABLE_CELL_LIMIT {
        return Err(Error::WeightRangeOverflow {
            cells,
            limit: TABLE_CELL_LIMIT,
        });
    }
    Ok((big.iter().map(|v| v.to_i64().unwrap()).collect(), scale))
}

fn check_dims(len: usize, p: &ProbabilityVector) -> Result<()> {
    if len != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            got: len,
        });
    }
    Ok(())
}

/// Khintchine constant of `a` under the distribution induced by `p`:
/// the exact expectation of |a·x|.
///
/// `Brute` enumerates the cube (bounded by `cap`); `Dp` aggregates a
/// (weight class, dot value) counting table and has no cube bound. Rational
/// coordinates are cleared to integers first; |c a·x| = c |a·x| for the
/// positive scale factor c, so the result is divided back out.
pub fn khintchine(
    a: &[Rational],
    p: &ProbabilityVector,
    method: KhintchineMethod,
    cap: usize,
) -> Result<KhintchineResult> {
    check_dims(a.len(), p)?;
    let n = a.len();
    let (ints, scale) = to_scaled_ints(a)?;

    // Per weight class, the integer sum of |a' | x| over that class.
    let mut class_sums = vec![BigInt::zero(); n + 1];
    match method {
        KhintchineMethod::Brute => {
            if n > cap.min(MAX_PLAYERS) {
                return Err(Error::InstanceTooLarge {
                    n,
                    cap: cap.min(MAX_PLAYERS),
                });
            }
            for x in Assignment::cube(n) {
                let dot: i64 = ints.iter().enumerate().map(|(i, w)| w * x.sign(i)).sum();
                class_sums[x.weight()] += dot.unsigned_abs();
            }
        }
        KhintchineMethod::Dp => {
            let table = DotCountTable::build(&ints)?;
            for (wt, row) in table.counts.iter().enumerate() {
                for (idx, &c) in row.iter().enumerate() {
                    if c != 0 {
                        class_sums[wt] += BigInt::from(c) * table.dot_of(idx).unsigned_abs();
                    }
                }
            }
        }
    }

    let total: Rational = class_sums
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_zero())
        .map(|(wt, s)| p.mu_prime_for_weight(wt) * Rational::from(s))
        .sum();
    let value = total / (p.lambda() * Rational::from(scale));
    Ok(KhintchineResult { value, method })
}

/// Pr_{x ~ mu}[w·x = 0], computed exactly from the counting table. The
/// zero set is invariant under clearing denominators, so rational `w` is
/// accepted and scaled internally. No cube bound: the table is polynomial
/// in n times the scaled weight magnitude.
pub fn partition_probability(w: &[Rational], p: &ProbabilityVector) -> Result<Rational> {
    check_dims(w.len(), p)?;
    let (ints, _) = to_scaled_ints(w)?;
    let table = DotCountTable::build(&ints)?;
    let zero_idx = table.offset as usize;
    let mass: Rational = table
        .counts
        .iter()
        .enumerate()
        .filter(|(_, row)| row[zero_idx] != 0)
        .map(|(wt, row)| p.mu_prime_for_weight(wt) * Rational::from(row[zero_idx]))
        .sum();
    Ok(mass / p.lambda())
}
