use num_complex::Complex64;
use serde::Serialize;

use crate::scalar::Scalar;
use crate::{Error, Result};

/// Power series in `z` truncated after `z^order`; `coeffs.len() == order + 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncatedSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> TruncatedSeries<T> {
    /// Pads with zeros or truncates to `order`.
    pub fn new(mut coeffs: Vec<T>, order: usize) -> Self {
        coeffs.resize(order + 1, T::zero());
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn constant(c: T, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    /// `c z^p`.
    pub fn monomial(c: T, p: usize, order: usize) -> Self {
        let mut coeffs = vec![T::zero(); order + 1];
        if p <= order {
            coeffs[p] = c;
        }
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> T {
        self.coeffs.get(n).cloned().unwrap_or_else(T::zero)
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                expected: self.order(),
                got: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a.clone(), b.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.order();
        let mut out = vec![T::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == T::zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Ok(Self { coeffs: out })
    }

    /// `1 / self`; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = self.coeffs[0].clone();
        if c0 == T::zero() {
            return Err(Error::InvalidParameter("reciprocal of a series without constant term".into()));
        }
        let n = self.order();
        let mut out: Vec<T> = Vec::with_capacity(n + 1);
        out.push(T::one() / c0.clone());
        for m in 1..=n {
            let mut acc = T::zero();
            for i in 1..=m {
                acc = acc + self.coeffs[i].clone() * out[m - i].clone();
            }
            out.push(-acc / c0.clone());
        }
        Ok(Self { coeffs: out })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.reciprocal()?)
    }

    /// Square root with the constant term's root taken in the field (positive branch).
    pub fn sqrt(&self) -> Result<Self> {
        let c0 = self.coeffs[0].clone();
        let r0 = c0
            .try_sqrt()
            .filter(|r| *r != T::zero())
            .ok_or_else(|| Error::InvalidParameter(format!("constant term {c0:?} has no usable square root")))?;
        let n = self.order();
        let two = T::from_i64(2);
        let mut out: Vec<T> = Vec::with_capacity(n + 1);
        out.push(r0.clone());
        for m in 1..=n {
            let mut acc = self.coeffs[m].clone();
            for i in 1..m {
                acc = acc - out[i].clone() * out[m - i].clone();
            }
            out.push(acc / (two.clone() * r0.clone()));
        }
        Ok(Self { coeffs: out })
    }

    /// `self(inner(z))` for `inner(0) = 0`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check_order(inner)?;
        if inner.coeffs[0] != T::zero() {
            return Err(Error::InvalidParameter("inner series must vanish at zero".into()));
        }
        // Horner in series arithmetic.
        let n = self.order();
        let mut acc = Self::zero(n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner)?;
            acc.coeffs[0] = acc.coeffs[0].clone() + c.clone();
        }
        Ok(acc)
    }

    /// `d/dz`, one order shorter.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        if n == 0 {
            return Self::zero(0);
        }
        Self {
            coeffs: (1..=n).map(|i| self.coeffs[i].clone() * T::from_i64(i as i64)).collect(),
        }
    }

    /// `z d/dz`, same order.
    pub fn euler(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.clone() * T::from_i64(i as i64))
                .collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..=order.min(self.order())].to_vec(), order)
    }

    pub fn to_f64(&self) -> TruncatedSeries<f64> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(Scalar::to_f64).collect(),
        }
    }

    pub fn eval(&self, z: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * z.clone() + c.clone())
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_f64())
    }

    /// Evaluate at `z`, refusing when the last retained term is not negligible:
    /// `|a_N z^N| > tail_tol · max(1, |value|)`.
    pub fn eval_checked(&self, z: Complex64, tail_tol: f64) -> Result<Complex64> {
        let v = self.eval_complex(z);
        let n = self.order();
        let tail = self.coeffs[n].to_f64().abs() * z.norm().powi(n as i32);
        if !(tail <= tail_tol * v.norm().max(1.0)) {
            return Err(Error::SeriesDivergence { radius: z.norm(), tail });
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Rational};
    use proptest::prelude::*;

    fn geometric(n: usize) -> TruncatedSeries<Rational> {
        TruncatedSeries::new(vec![rational(1, 1); n + 1], n)
    }

    #[test]
    fn reciprocal_of_geometric() {
        let g = geometric(6);
        let r = g.reciprocal().unwrap();
        assert_eq!(r.coeffs()[..2], [rational(1, 1), rational(-1, 1)]);
        assert!(r.coeffs()[2..].iter().all(|c| *c == rational(0, 1)));
        assert_eq!(g.mul(&r).unwrap(), TruncatedSeries::constant(rational(1, 1), 6));
    }

    #[test]
    fn compose_and_derivative() {
        // 1/(1-z) composed with 2z is 1/(1-2z).
        let g = geometric(5);
        let inner = TruncatedSeries::monomial(rational(2, 1), 1, 5);
        let c = g.compose(&inner).unwrap();
        for n in 0..=5 {
            assert_eq!(c.coeff(n), rational(1 << n, 1));
        }
        let d = g.derivative();
        assert_eq!(d.order(), 4);
        assert_eq!(d.coeff(3), rational(4, 1));
        assert_eq!(g.euler().coeff(3), rational(3, 1));
        assert!(g.compose(&g).is_err());
    }

    #[test]
    fn order_mismatch() {
        assert!(matches!(geometric(3).add(&geometric(4)), Err(Error::OrderMismatch { .. })));
    }

    #[test]
    fn float_eval_and_divergence_check() {
        let g = geometric(40).to_f64();
        let v = g.eval_checked(Complex64::new(0.1, 0.0), 1e-12).unwrap();
        assert!((v.re - 1.0 / 0.9).abs() < 1e-14);
        assert!(g.eval_checked(Complex64::new(0.9, 0.0), 1e-12).is_err());
    }

    proptest! {
        #[test]
        fn sqrt_squares_back(c in proptest::collection::vec((-20i64..20, 1i64..9), 8), r0 in 1i64..6) {
            let mut coeffs: Vec<Rational> = c.iter().map(|&(p, q)| rational(p, q)).collect();
            coeffs[0] = rational(r0 * r0, 1);
            let s = TruncatedSeries::new(coeffs, 7);
            let root = s.sqrt().unwrap();
            prop_assert_eq!(root.mul(&root).unwrap(), s);
        }

        #[test]
        fn product_is_commutative(a in proptest::collection::vec(-9i64..9, 6), b in proptest::collection::vec(-9i64..9, 6)) {
            let sa = TruncatedSeries::new(a.iter().map(|&x| rational(x, 1)).collect(), 5);
            let sb = TruncatedSeries::new(b.iter().map(|&x| rational(x, 1)).collect(), 5);
            prop_assert_eq!(sa.mul(&sb).unwrap(), sb.mul(&sa).unwrap());
        }
    }
}
