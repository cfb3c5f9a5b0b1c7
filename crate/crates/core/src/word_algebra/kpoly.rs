use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::scalar::Rational;
use crate::{Error, Result};

/// Polynomial in the symbol `k` with integer coefficients; `coeffs[i]` multiplies `k^i`.
///
/// Always stored without trailing zeros, so structural equality is polynomial equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct KPoly {
    coeffs: Vec<BigInt>,
}

impl KPoly {
    pub fn from_coeffs<I, C>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: Into<BigInt>,
    {
        let mut p = Self {
            coeffs: coeffs.into_iter().map(Into::into).collect(),
        };
        p.trim();
        p
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::from_coeffs([c.into()])
    }

    /// The symbol `k` itself.
    pub fn k() -> Self {
        Self::from_coeffs([0, 1])
    }

    /// `k + c`.
    pub fn k_plus(c: i64) -> Self {
        Self::from_coeffs([c, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c))
    }

    /// Horner evaluation at an integer `k`.
    pub fn eval(&self, k: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * k + c)
    }

    pub fn eval_rational(&self, k: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * k + Rational::from_integer(c.clone()))
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }
}

impl Zero for KPoly {
    fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for KPoly {
    fn one() -> Self {
        Self::constant(1)
    }
}

impl Add for &KPoly {
    type Output = KPoly;
    fn add(self, rhs: &KPoly) -> KPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigInt::zero();
        KPoly::from_coeffs((0..len).map(|i| {
            self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero)
        }))
    }
}

impl Sub for &KPoly {
    type Output = KPoly;
    fn sub(self, rhs: &KPoly) -> KPoly {
        self + &(-rhs)
    }
}

impl Neg for &KPoly {
    type Output = KPoly;
    fn neg(self) -> KPoly {
        KPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &KPoly {
    type Output = KPoly;
    fn mul(self, rhs: &KPoly) -> KPoly {
        if self.is_zero() || rhs.is_zero() {
            return KPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        KPoly::from_coeffs(out)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for KPoly {
            type Output = KPoly;
            fn $method(self, rhs: KPoly) -> KPoly {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for KPoly {
    type Output = KPoly;
    fn neg(self) -> KPoly {
        -&self
    }
}

/// Renders as `c0+c1*k+c2*k^2`, skipping zero terms; the zero polynomial is `0`.
impl fmt::Display for KPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            let body = match (i, mag.is_one()) {
                (0, _) => mag.to_string(),
                (1, true) => "k".to_string(),
                (1, false) => format!("{mag}*k"),
                (_, true) => format!("k^{i}"),
                (_, false) => format!("{mag}*k^{i}"),
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for KPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid k-polynomial {s:?}"));
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad());
        }
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in s.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);

        let mut acc = KPoly::zero();
        for term in terms {
            let (neg, body) = match term.as_bytes().first() {
                Some(b'-') => (true, &term[1..]),
                Some(b'+') => (false, &term[1..]),
                _ => (false, term),
            };
            let (coef, power) = match body.find('k') {
                None => (body.parse::<BigInt>().map_err(|_| bad())?, 0usize),
                Some(pos) => {
                    let coef = match &body[..pos] {
                        "" => BigInt::one(),
                        c => c.strip_suffix('*').ok_or_else(bad)?.parse().map_err(|_| bad())?,
                    };
                    let power = match &body[pos + 1..] {
                        "" => 1,
                        p => p.strip_prefix('^').ok_or_else(bad)?.parse().map_err(|_| bad())?,
                    };
                    (coef, power)
                }
            };
            let mut coeffs = vec![BigInt::zero(); power + 1];
            coeffs[power] = if neg { -coef } else { coef };
            acc = acc + KPoly::from_coeffs(coeffs);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_form_drops_trailing_zeros() {
        let p = KPoly::from_coeffs([1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(p, KPoly::from_coeffs([1, 2]));
        assert!((&p - &p).is_zero());
        assert_eq!((&p - &p).degree(), None);
    }

    #[test]
    fn arithmetic_and_eval() {
        let km1 = KPoly::k_plus(-1);
        let sq = km1.pow(2);
        assert_eq!(sq, KPoly::from_coeffs([1, -2, 1]));
        for k in 2..8i64 {
            assert_eq!(sq.eval(&BigInt::from(k)), BigInt::from((k - 1) * (k - 1)));
        }
        assert_eq!(KPoly::k().eval_rational(&crate::scalar::rational(1, 3)), crate::scalar::rational(1, 3));
    }

    #[test]
    fn display_format() {
        assert_eq!(KPoly::zero().to_string(), "0");
        assert_eq!(KPoly::from_coeffs([-1, 1]).to_string(), "-1+k");
        assert_eq!(KPoly::from_coeffs([1, -2, 1]).to_string(), "1-2*k+k^2");
        assert_eq!(KPoly::from_coeffs([0, 0, 3]).to_string(), "3*k^2");
        assert_eq!(KPoly::from_coeffs([4, 0, 0, -1]).to_string(), "4-k^3");
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["", "k^", "2k", "1+*k", "x", "k^-1"] {
            assert!(s.parse::<KPoly>().is_err(), "{s:?}");
        }
        assert_eq!("3 + k - k^2".parse::<KPoly>().unwrap(), KPoly::from_coeffs([3, 1, -1]));
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(c in proptest::collection::vec(-1000i64..1000, 0..8)) {
            let p = KPoly::from_coeffs(c);
            prop_assert_eq!(p.to_string().parse::<KPoly>().unwrap(), p);
        }

        #[test]
        fn product_evaluates_pointwise(a in proptest::collection::vec(-50i64..50, 0..6),
                                       b in proptest::collection::vec(-50i64..50, 0..6),
                                       k in -9i64..9) {
            let (pa, pb) = (KPoly::from_coeffs(a), KPoly::from_coeffs(b));
            let k = BigInt::from(k);
            prop_assert_eq!((&pa * &pb).eval(&k), pa.eval(&k) * pb.eval(&k));
            prop_assert_eq!((&pa + &pb).eval(&k), pa.eval(&k) + pb.eval(&k));
        }
    }
}
