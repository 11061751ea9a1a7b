use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator. All solver arithmetic goes through this type; nothing in the
/// crate ever rounds.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `numer/denom`, reducing to lowest terms.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    /// 1/2, the constant that keeps showing up in sign-expectation identities.
    pub fn half() -> Self {
        Self(BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    /// The exact integer value, when the denominator is 1.
    pub fn to_bigint(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_bigint().and_then(|n| n.to_i64())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // BigRational prints "n" for integers and "n/d" otherwise.
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidRational(s.to_string());
        let parse_int = |part: &str| BigInt::from_str(part.trim()).map_err(|_| bad());
        match s.split_once('/') {
            Some((n, d)) => {
                let numer = parse_int(n)?;
                let denom = parse_int(d)?;
                if denom.is_zero() {
                    return Err(Error::ZeroDenominator);
                }
                Ok(Self(BigRational::new(numer, denom)))
            }
            None => Ok(Self::from_integer(parse_int(s)?)),
        }
    }
}

macro_rules! impl_from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Rational {
            fn from(n: $t) -> Self {
                Self::from_integer(BigInt::from(n))
            }
        }
    )*};
}

impl_from_int!(i8, i16, i32, i64, u8, u16, u32, u64, usize);

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Self::from_integer(n)
    }
}

impl From<&BigInt> for Rational {
    fn from(n: &BigInt) -> Self {
        Self::from_integer(n.clone())
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);

// Division panics on a zero divisor, matching built-in integer semantics.
impl_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        self.0 -= rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl MulAssign for Rational {
    fn mul_assign(&mut self, rhs: Rational) {
        self.0 *= rhs.0;
    }
}

impl DivAssign<&Rational> for Rational {
    fn div_assign(&mut self, rhs: &Rational) {
        assert!(!rhs.is_zero(), "division by zero");
        self.0 /= &rhs.0;
    }
}

impl DivAssign for Rational {
    fn div_assign(&mut self, rhs: Rational) {
        *self /= &rhs;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

struct RationalVisitor;

impl de::Visitor<'_> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a rational as a \"p/q\" string or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
        v.parse().map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
        Ok(Rational::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
        Ok(Rational::from(v))
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        deserializer.deserialize_any(RationalVisitor)
    }
}

/// Binomial coefficient `C(n, k)`, exact.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        // Each intermediate product is divisible by i + 1, so this stays exact.
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Clears denominators: returns `(v * scale, scale)` where `scale` is the
/// least positive integer making every coordinate integral.
pub fn scale_to_integers(values: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let scale = values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let scaled = values
        .iter()
        .map(|v| {
            let r = v * &Rational::from(&scale);
            debug_assert!(r.is_integer());
            r.to_bigint().unwrap()
        })
        .collect();
    (scaled, scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_and_reduces() {
        assert_eq!(q("2/4"), q("1/2"));
        assert_eq!(q("-2/4"), q("1/-2"));
        assert_eq!(q("6/3"), Rational::from(2));
        assert_eq!(q(" 7 / 2 "), Rational::new(7, 2).unwrap());
        assert_eq!(q("+3"), Rational::from(3));
    }

    #[test]
    fn normalizes_denominator_sign() {
        let r = q("3/-6");
        assert_eq!(r.numer(), &BigInt::from(-1));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(r.to_string(), "-1/2");
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(q("1/2").to_string(), "1/2");
        assert!(matches!("".parse::<Rational>(), Err(Error::InvalidRational(_))));
        assert!(matches!("a/b".parse::<Rational>(), Err(Error::InvalidRational(_))));
        assert!(matches!("1.5".parse::<Rational>(), Err(Error::InvalidRational(_))));
        assert!(matches!("1/0".parse::<Rational>(), Err(Error::ZeroDenominator)));
        assert!(matches!("1/2/3".parse::<Rational>(), Err(Error::InvalidRational(_))));
    }

    #[test]
    fn displays_integers_bare() {
        assert_eq!(Rational::from(-5).to_string(), "-5");
        assert_eq!(q("10/5").to_string(), "2");
        assert_eq!(Rational::zero().to_string(), "0");
    }

    #[test]
    fn arithmetic_is_exact() {
        let third = q("1/3");
        let sum: Rational = (0..3).map(|_| third.clone()).sum();
        assert!(sum.is_one());
        assert_eq!(&q("1/6") + &q("1/3"), q("1/2"));
        assert_eq!(q("2/3") * q("3/4"), q("1/2"));
        assert_eq!(q("1/2") - q("1/2"), Rational::zero());
        assert_eq!(q("7/2") / q("7/4"), Rational::from(2));
        assert_eq!(-q("1/2"), q("-1/2"));
        assert_eq!(q("-3/2").abs(), q("3/2"));
    }

    #[test]
    fn integer_extraction() {
        assert_eq!(q("8/2").to_i64(), Some(4));
        assert_eq!(q("1/2").to_i64(), None);
        assert!(q("9/3").is_integer());
        assert!(!q("1/3").is_integer());
    }

    #[test]
    fn serde_round_trip() {
        let r = q("-7/12");
        let js = serde_json::to_string(&r).unwrap();
        assert_eq!(js, "\"-7/12\"");
        assert_eq!(serde_json::from_str::<Rational>(&js).unwrap(), r);
        // Bare JSON integers are accepted as shorthand.
        assert_eq!(serde_json::from_str::<Rational>("3").unwrap(), Rational::from(3));
        assert_eq!(serde_json::from_str::<Rational>("-2").unwrap(), Rational::from(-2));
        assert!(serde_json::from_str::<Rational>("0.5").is_err());
    }

    #[test]
    fn binomials_and_factorials() {
        let rows = [
            (0, 0, 1),
            (4, 2, 6),
            (5, 0, 1),
            (5, 5, 1),
            (5, 6, 0),
            (10, 3, 120),
        ];
        for (n, k, want) in rows {
            assert_eq!(binomial(n, k), BigInt::from(want), "C({n},{k})");
        }
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(60, 30), binomial(59, 29) + binomial(59, 30));
    }

    #[test]
    fn scaling_clears_denominators() {
        let vals = [q("1/2"), q("-3/4"), Rational::from(2)];
        let (ints, scale) = scale_to_integers(&vals);
        assert_eq!(scale, BigInt::from(4));
        assert_eq!(ints, vec![BigInt::from(2), BigInt::from(-3), BigInt::from(8)]);
        let (ints, scale) = scale_to_integers(&[]);
        assert!(ints.is_empty());
        assert_eq!(scale, BigInt::from(1));
    }

    #[test]
    fn ordering_follows_value() {
        assert!(q("1/3") < q("1/2"));
        assert!(q("-1/2") < q("-1/3"));
        assert!(q("2/4") == q("1/2"));
    }
}
