use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{scale_to_integers, Rational};

/// Hard ceiling on cube dimension so bitmask enumeration stays in a `u64`.
pub const MAX_PLAYERS: usize = 63;

/// A point of the cube {-1,+1}^n, stored as the bitmask of +1 coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Assignment {
    n: usize,
    mask: u64,
}

impl Assignment {
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= MAX_PLAYERS, "at most {MAX_PLAYERS} coordinates");
        debug_assert!(n == 64 || mask < (1u64 << n));
        Self { n, mask }
    }

    /// Builds a point from explicit signs; every entry must be +1 or -1.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        if signs.is_empty() || signs.len() > MAX_PLAYERS {
            return Err(Error::InstanceTooLarge {
                n: signs.len(),
                cap: MAX_PLAYERS,
            });
        }
        let mut mask = 0u64;
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => mask |= 1 << i,
                -1 => {}
                _ => return Err(Error::Precondition(format!("sign entry {s} is not +1 or -1"))),
            }
        }
        Ok(Self::from_mask(signs.len(), mask))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Coordinate i as +1 or -1.
    pub fn sign(&self, i: usize) -> i64 {
        debug_assert!(i < self.n);
        if self.mask >> i & 1 == 1 {
            1
        } else {
            -1
        }
    }

    /// Number of +1 coordinates; the point's weight class.
    pub fn weight(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// The point with coordinate i flipped.
    pub fn flip(&self, i: usize) -> Self {
        debug_assert!(i < self.n);
        Self {
            n: self.n,
            mask: self.mask ^ (1 << i),
        }
    }

    pub fn all_minus_ones(n: usize) -> Self {
        Self::from_mask(n, 0)
    }

    pub fn all_plus_ones(n: usize) -> Self {
        Self::from_mask(n, if n == 0 { 0 } else { (1u64 << n) - 1 })
    }

    /// True at the two constant-sign points.
    pub fn is_extreme(&self) -> bool {
        self.mask == 0 || self.mask == Self::all_plus_ones(self.n).mask
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.n).map(|i| self.sign(i) as i8).collect()
    }

    /// Iterates the whole cube in mask order.
    pub fn cube(n: usize) -> impl Iterator<Item = Assignment> {
        assert!(n <= MAX_PLAYERS);
        (0..1u64 << n).map(move |mask| Assignment { n, mask })
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:+}", self.sign(i))?;
        }
        write!(f, "]")
    }
}

fn nonempty_weights(weights: &[Rational]) -> Result<()> {
    if weights.is_empty() {
        Err(Error::EmptyInstance)
    } else {
        Ok(())
    }
}

/// A weighted voting game: f(x) = sign(w·x - theta), with sign(0) = +1.
///
/// The quota comparison is over cube points, so a coalition S wins exactly
/// when 2 w(S) - w(N) >= theta.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawGame")]
pub struct WeightedGame {
    weights: Vec<Rational>,
    theta: Rational,
}

#[derive(Deserialize)]
struct RawGame {
    weights: Vec<Rational>,
    theta: Rational,
}

impl TryFrom<RawGame> for WeightedGame {
    type Error = Error;

    fn try_from(raw: RawGame) -> Result<Self> {
        WeightedGame::new(raw.weights, raw.theta)
    }
}

impl WeightedGame {
    pub fn new(weights: Vec<Rational>, theta: Rational) -> Result<Self> {
        nonempty_weights(&weights)?;
        Ok(Self { weights, theta })
    }

    /// Convenience constructor from integer data.
    pub fn from_ints(weights: &[i64], theta: i64) -> Result<Self> {
        Self::new(
            weights.iter().map(|&w| Rational::from(w)).collect(),
            Rational::from(theta),
        )
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn theta(&self) -> &Rational {
        &self.theta
    }

    pub fn total_weight(&self) -> Rational {
        self.weights.iter().sum()
    }

    pub fn has_nonnegative_weights(&self) -> bool {
        !self.weights.iter().any(Rational::is_negative)
    }

    pub fn dot(&self, x: &Assignment) -> Result<Rational> {
        if x.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.n(),
            });
        }
        let mut acc = Rational::zero();
        for (i, w) in self.weights.iter().enumerate() {
            if x.sign(i) == 1 {
                acc += w;
            } else {
                acc -= w;
            }
        }
        Ok(acc)
    }

    /// Evaluates the game at a cube point; +1 on ties.
    pub fn eval(&self, x: &Assignment) -> Result<i8> {
        let d = self.dot(x)? - &self.theta;
        Ok(if d.is_negative() { -1 } else { 1 })
    }

    /// Rescales weights and quota to sum-1 weights. Positive scaling never
    /// changes the game's values, so this picks a canonical representative.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total_weight();
        if !total.is_positive() {
            return Err(Error::Precondition(format!(
                "cannot normalize: total weight {total} is not positive"
            )));
        }
        Ok(Self {
            weights: self.weights.iter().map(|w| w / &total).collect(),
            theta: &self.theta / &total,
        })
    }

    pub(crate) fn scaled(&self) -> ScaledGame {
        ScaledGame::from_game(self)
    }
}

/// Integer form of a game, produced by clearing denominators. Scaling by the
/// positive common denominator preserves every sign, so evaluation over the
/// integers is exact. An `i128` fast path covers all realistic inputs.
pub(crate) enum ScaledGame {
    Small { weights: Vec<i128>, theta: i128 },
    Big { weights: Vec<BigInt>, theta: BigInt },
}

impl ScaledGame {
    pub(crate) fn from_game(g: &WeightedGame) -> Self {
        let mut all: Vec<Rational> = g.weights.to_vec();
        all.push(g.theta.clone());
        let (ints, _) = scale_to_integers(&all);
        let theta = ints.last().unwrap().clone();
        let weights = &ints[..ints.len() - 1];

        let small: Option<Vec<i128>> = weights.iter().map(|w| w.to_i128()).collect();
        if let (Some(ws), Some(th)) = (small, theta.to_i128()) {
            // Guard the dot product: sum of |w| must stay clear of overflow.
            let magnitude: i128 = ws.iter().fold(0i128, |acc, w| {
                acc.saturating_add(w.unsigned_abs().min(i128::MAX as u128) as i128)
            });
            if magnitude < i128::MAX / 4 && th.checked_abs().is_some() {
                return ScaledGame::Small { weights: ws, theta: th };
            }
        }
        ScaledGame::Big {
            weights: weights.to_vec(),
            theta,
        }
    }

    /// f(x) = +1?
    pub(crate) fn wins(&self, x: Assignment) -> bool {
        match self {
            ScaledGame::Small { weights, theta } => {
                let mut acc = 0i128;
                for (i, w) in weights.iter().enumerate() {
                    if x.sign(i) == 1 {
                        acc += w;
                    } else {
                        acc -= w;
                    }
                }
                acc >= *theta
            }
            ScaledGame::Big { weights, theta } => {
                let mut acc = BigInt::zero();
                for (i, w) in weights.iter().enumerate() {
                    if x.sign(i) == 1 {
                        acc += w;
                    } else {
                        acc -= w;
                    }
                }
                acc >= *theta
            }
        }
    }
}

/// Evaluates an all-integer game at a mask point; +1 on ties. Used by the
/// enumeration scans where constructing `Rational`s per point would dominate.
pub(crate) fn int_game_wins(weights: &[i64], theta: i64, mask: u64) -> bool {
    let mut acc = 0i64;
    for (i, w) in weights.iter().enumerate() {
        if mask >> i & 1 == 1 {
            acc += w;
        } else {
            acc -= w;
        }
    }
    acc >= theta
}

/// The game's full truth table as packed bits, mask order, 1 = wins.
pub(crate) fn truth_table(g: &WeightedGame) -> Vec<u64> {
    let n = g.n();
    assert!(n <= 24, "truth tables are for desk-scale games");
    let scaled = g.scaled();
    let mut bits = vec![0u64; ((1usize << n) + 63) / 64];
    for x in Assignment::cube(n) {
        if scaled.wins(x) {
            bits[(x.mask() >> 6) as usize] |= 1 << (x.mask() & 63);
        }
    }
    bits
}
