//! Coefficient fields shared by the exact and floating-point code paths.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// A field in which every routine of this crate can run: exact rationals for
/// identity checks, `f64` for numerics.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_i64(v: i64) -> Self;

    fn from_big(v: &BigInt) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// Square root when it exists in the field (perfect squares for rationals).
    fn try_sqrt(&self) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn ipow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_big(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }

    fn try_sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn ipow(&self, e: u32) -> Self {
        self.powi(e as i32)
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_big(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }

    fn try_sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = exact_isqrt(self.numer())?;
        let d = exact_isqrt(self.denom())?;
        Some(BigRational::new(n, d))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

fn exact_isqrt(v: &BigInt) -> Option<BigInt> {
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

/// Binomial coefficient as an exact integer (zero outside `0 <= k <= n`).
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Renders a rational as `p/q` (denominator always written).
pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> crate::Result<Rational> {
    let s = s.trim();
    let parse = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| crate::Error::Parse(format!("{s:?}: {e}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d.is_zero() {
                return Err(crate::Error::Parse(format!("{s:?}: zero denominator")));
            }
            Ok(Rational::new(parse(n)?, d))
        }
        None => Ok(Rational::from_integer(parse(s)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sqrt_only_for_squares() {
        assert_eq!(rational(9, 4).try_sqrt(), Some(rational(3, 2)));
        assert_eq!(rational(2, 1).try_sqrt(), None);
        assert_eq!(rational(-1, 4).try_sqrt(), None);
    }

    #[test]
    fn binomial_edges() {
        assert_eq!(binomial(6, 3), big(20));
        assert_eq!(binomial(6, 7), big(0));
        assert_eq!(binomial(6, -1), big(0));
        assert_eq!(binomial(0, 0), big(1));
    }

    #[test]
    fn rational_text_round_trip() {
        let r = rational(-6, 4);
        assert_eq!(rational_to_string(&r), "-3/2");
        assert_eq!(parse_rational("-3/2").unwrap(), r);
        assert_eq!(parse_rational("5").unwrap(), rational(5, 1));
        assert!(parse_rational("1/0").is_err());
    }
}
