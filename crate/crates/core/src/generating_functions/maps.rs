use num_complex::Complex64;

use super::series::TruncatedSeries;
use crate::scalar::{binomial, Scalar};
use crate::{Error, Result};

/// `α(z) = (1 - √(1-z)) / (1 + √(1-z))`, principal branch, undefined on `[1, ∞)`.
pub fn alpha_map(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re >= 1.0 {
        return Err(Error::BranchCut(format!("{z}")));
    }
    let s = (Complex64::new(1.0, 0.0) - z).sqrt();
    Ok((1.0 - s) / (1.0 + s))
}

/// `α^{-1}(z) = 4z / (1+z)²`.
pub fn alpha_inv(z: Complex64) -> Result<Complex64> {
    let d = (1.0 + z) * (1.0 + z);
    if d == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidParameter("alpha_inv has a pole at z = -1".into()));
    }
    Ok(4.0 * z / d)
}

/// Series of `α^{-1}(z) = 4z (1+z)^{-2}`.
pub fn alpha_inv_series<T: Scalar>(order: usize) -> TruncatedSeries<T> {
    // 4z/(1+z)² = Σ_{n>=1} 4 n (-1)^{n-1} z^n
    let coeffs = (0..=order)
        .map(|n| {
            let sign = if n % 2 == 1 { 1 } else { -1 };
            T::from_i64(4 * n as i64 * sign)
        })
        .collect();
    TruncatedSeries::new(coeffs, order)
}

/// Series of the stationary moment generating function
/// `(2 - k + √(k² - 4(k-1)z)) / (2(1-z))`.
pub fn stationary_mgf<T: Scalar>(k: u32, order: usize) -> Result<TruncatedSeries<T>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k = {k} must be at least 2")));
    }
    let kk = k as i64;
    let under = TruncatedSeries::new(vec![T::from_i64(kk * kk), T::from_i64(-4 * (kk - 1))], order);
    let num = under.sqrt()?.add(&TruncatedSeries::constant(T::from_i64(2 - kk), order))?;
    let den = TruncatedSeries::new(vec![T::from_i64(2), T::from_i64(-2)], order);
    num.div(&den)
}

/// Closed form of the stationary generating function at a complex point, `|z| < 1`.
pub fn stationary_mgf_value(k: u32, z: Complex64) -> Complex64 {
    let kf = k as f64;
    let root = (Complex64::new(kf * kf, 0.0) - 4.0 * (kf - 1.0) * z).sqrt();
    (2.0 - kf + root) / (2.0 * (1.0 - z))
}

/// `b_n = Σ_{j=0}^n binom(2n, n-j) a_j`.
pub fn binomial_transfer<T: Scalar>(a: &TruncatedSeries<T>) -> TruncatedSeries<T> {
    let n_max = a.order();
    let coeffs = (0..=n_max)
        .map(|n| {
            (0..=n).fold(T::zero(), |acc, j| {
                acc + T::from_big(&binomial(2 * n as u64, (n - j) as i64)) * a.coeff(j)
            })
        })
        .collect();
    TruncatedSeries::new(coeffs, n_max)
}

/// Inverse of [`binomial_transfer`] by forward substitution (the system is unit lower-triangular).
pub fn inverse_binomial_transfer<T: Scalar>(b: &TruncatedSeries<T>) -> TruncatedSeries<T> {
    let n_max = b.order();
    let mut a: Vec<T> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut acc = b.coeff(n);
        for (j, aj) in a.iter().enumerate() {
            acc = acc - T::from_big(&binomial(2 * n as u64, (n - j) as i64)) * aj.clone();
        }
        a.push(acc);
    }
    TruncatedSeries::new(a, n_max)
}

/// Series of `ρ_0(z) = (k-1) z (1-z) / ((k-1-z)(1+z-kz))`.
pub fn rho0_series<T: Scalar>(k: u32, order: usize) -> Result<TruncatedSeries<T>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k = {k} must be at least 2")));
    }
    let kk = k as i64;
    let num = TruncatedSeries::new(vec![T::zero(), T::from_i64(kk - 1), T::from_i64(1 - kk)], order);
    let d1 = TruncatedSeries::new(vec![T::from_i64(kk - 1), T::from_i64(-1)], order);
    let d2 = TruncatedSeries::new(vec![T::one(), T::from_i64(1 - kk)], order);
    num.div(&d1.mul(&d2)?)
}

/// `(4(k-1) - k² α^{-1}(z)) / (4(k-1)(1 - α^{-1}(z)))` as a series.
pub fn pde_prefactor<T: Scalar>(k: u32, order: usize) -> Result<TruncatedSeries<T>> {
    let kk = k as i64;
    let ai = alpha_inv_series::<T>(order);
    let four_k1 = TruncatedSeries::constant(T::from_i64(4 * (kk - 1)), order);
    let num = four_k1.sub(&ai.scale(&T::from_i64(kk * kk)))?;
    let den = four_k1.sub(&ai.scale(&T::from_i64(4 * (kk - 1))))?;
    num.div(&den)
}
