use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::game::Assignment;
use crate::rational::{binomial, factorial, Rational};

/// Weighting scheme p = (p_0, ..., p_{n-1}) over coalition sizes. Entry p_t
/// weights the event that a fixed player joins a coalition of t others, so
/// validity requires p_t >= 0 and sum_t C(n-1, t) p_t = 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProbabilityVector {
    entries: Vec<Rational>,
}

impl ProbabilityVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyInstance);
        }
        let n = entries.len();
        for (index, value) in entries.iter().enumerate() {
            if value.is_negative() {
                return Err(Error::NegativeEntry {
                    index,
                    value: value.clone(),
                });
            }
        }
        let sum: Rational = entries
            .iter()
            .enumerate()
            .map(|(t, p)| Rational::from(binomial(n - 1, t)) * p)
            .sum();
        if !sum.is_one() {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { entries })
    }

    /// The uniform scheme p_t = 1/2^{n-1}.
    pub fn banzhaf(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInstance);
        }
        let p = Rational::new(1, BigInt::one() << (n - 1))?;
        Ok(Self {
            entries: vec![p; n],
        })
    }

    /// The scheme p_t = (n-t-1)! t! / n! that weights every coalition size
    /// class equally.
    pub fn shapley(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInstance);
        }
        let n_fact = factorial(n);
        let entries = (0..n)
            .map(|t| {
                Rational::new(factorial(n - t - 1) * factorial(t), n_fact.clone()).unwrap()
            })
            .collect();
        Ok(Self { entries })
    }

    pub fn preset(preset: Preset, n: usize) -> Result<Self> {
        match preset {
            Preset::Banzhaf => Self::banzhaf(n),
            Preset::Shapley => Self::shapley(n),
        }
    }

    /// Number of players the scheme is for.
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    /// p_t with the boundary convention p_{-1} = p_n = 0.
    pub fn p(&self, t: isize) -> Rational {
        if t < 0 || t as usize >= self.entries.len() {
            Rational::zero()
        } else {
            self.entries[t as usize].clone()
        }
    }

    /// The unnormalized cube measure mu'(x) = p_{wt(x)} + p_{wt(x)-1},
    /// evaluated per weight class.
    pub fn mu_prime_for_weight(&self, weight: usize) -> Rational {
        self.p(weight as isize) + self.p(weight as isize - 1)
    }

    pub fn mu_prime(&self, x: &Assignment) -> Result<Rational> {
        if x.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.n(),
            });
        }
        Ok(self.mu_prime_for_weight(x.weight()))
    }

    /// Total mass Lambda = sum_x mu'(x) = sum_t C(n,t) (p_t + p_{t-1}).
    /// Always positive: the validity constraint forces some p_t > 0.
    pub fn lambda(&self) -> Rational {
        let n = self.n();
        (0..=n)
            .map(|t| {
                Rational::from(binomial(n, t)) * self.mu_prime_for_weight(t)
            })
            .sum()
    }

    /// True when every entry is strictly positive.
    pub fn is_regular(&self) -> bool {
        self.entries.iter().all(Rational::is_positive)
    }

    /// True when some size class t with alpha n <= t <= (1 - beta) n carries
    /// positive weight. Such schemes keep the counting reductions
    /// well-conditioned; both presets qualify for any constant fractions.
    pub fn is_reasonable(&self, alpha: &Rational, beta: &Rational) -> Result<bool> {
        if !alpha.is_positive() || !beta.is_positive() || !(alpha + beta - Rational::one()).is_negative() {
            return Err(Error::Precondition(format!(
                "fractions must satisfy 0 < alpha, beta and alpha + beta < 1; got alpha = {alpha}, beta = {beta}"
            )));
        }
        let n = Rational::from(self.n());
        let lo = alpha * &n;
        let hi = (Rational::one() - beta) * &n;
        Ok(self
            .entries
            .iter()
            .enumerate()
            .any(|(t, p)| p.is_positive() && Rational::from(t) >= lo && Rational::from(t) <= hi))
    }

    /// `is_reasonable` with both fractions at 1/4.
    pub fn is_reasonable_default(&self) -> bool {
        let quarter = Rational::new(1, 4).unwrap();
        self.is_reasonable(&quarter, &quarter).unwrap()
    }
}

impl Serialize for ProbabilityVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ProbabilityVector", 2)?;
        s.serialize_field("n", &self.n())?;
        s.serialize_field("entries", &self.entries)?;
        s.end()
    }
}

#[derive(Deserialize)]
struct RawProbabilityVector {
    n: usize,
    entries: Vec<Rational>,
}

impl TryFrom<RawProbabilityVector> for ProbabilityVector {
    type Error = Error;

    fn try_from(raw: RawProbabilityVector) -> Result<Self> {
        if raw.n != raw.entries.len() {
            return Err(Error::DimensionMismatch {
                expected: raw.n,
                got: raw.entries.len(),
            });
        }
        Self::new(raw.entries)
    }
}

impl<'de> Deserialize<'de> for ProbabilityVector {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let raw = RawProbabilityVector::deserialize(deserializer)?;
        Self::try_from(raw).map_err(serde::de::Error::custom)
    }
}

/// Named preset schemes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Preset {
    Banzhaf,
    Shapley,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "banzhaf" => Ok(Preset::Banzhaf),
            "shapley" => Ok(Preset::Shapley),
            _ => Err(Error::UnknownPreset(s.to_string())),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Banzhaf => f.write_str("banzhaf"),
            Preset::Shapley => f.write_str("shapley"),
        }
    }
}

/// The probability distribution mu = mu' / Lambda induced on the cube, with
/// its normalizing constant cached.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InducedDistribution {
    base: ProbabilityVector,
    lambda: Rational,
}

impl InducedDistribution {
    pub fn new(base: ProbabilityVector) -> Self {
        let lambda = base.lambda();
        debug_assert!(lambda.is_positive());
        Self { base, lambda }
    }

    pub fn base(&self) -> &ProbabilityVector {
        &self.base
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn mu_prime(&self, x: &Assignment) -> Result<Rational> {
        self.base.mu_prime(x)
    }

    /// Normalized point mass mu(x).
    pub fn mu(&self, x: &Assignment) -> Result<Rational> {
        Ok(self.base.mu_prime(x)? / &self.lambda)
    }
}
