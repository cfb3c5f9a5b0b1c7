use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::combinatorics::catalan;
use crate::scalar::{binomial, Rational, Scalar};
use crate::{Error, Result};

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k = {k} must be at least 2")));
    }
    Ok(())
}

/// `m_n(∞) = 1 - Σ_{j=0}^{n-1} (k-1)^{j+1} C_j / k^{2j+1}` for `n = 0..=n_max`.
pub fn stationary_moments_catalan(k: u32, n_max: usize) -> Result<Vec<Rational>> {
    check_k(k)?;
    let kq = Rational::from_i64(k as i64);
    let k1 = Rational::from_i64(k as i64 - 1);
    let mut out = Vec::with_capacity(n_max + 1);
    let mut acc = Rational::one();
    out.push(acc.clone());
    for j in 0..n_max {
        let term = k1.ipow(j as u32 + 1) * Rational::from_integer(catalan(j as u64)) / kq.ipow(2 * j as u32 + 1);
        acc = acc - term;
        out.push(acc.clone());
    }
    Ok(out)
}

/// Polynomial with integer coefficients in one variable, `coeffs[i]` multiplying `x^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PScriptPoly {
    pub n: usize,
    pub coeffs: Vec<BigInt>,
}

impl PScriptPoly {
    pub fn eval<T: Scalar>(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + T::from_big(c))
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

impl fmt::Display for PScriptPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            let coef = if mag.is_one() && i > 0 { String::new() } else { mag.to_string() };
            let var = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            write!(f, "{sign}{coef}{var}")?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Largest order accepted by [`p_script`].
pub const P_SCRIPT_GUARD: usize = 40;

/// The polynomial `𝒫_n` with `d^n/dz^n [z^n / (1 + √z)] = 𝒫_n(√z) / (2^n (1 + √z)^{n+1})`.
///
/// Works in `x = √z` with `d/dz = (1/(2x)) d/dx`, carrying each derivative as a
/// Laurent polynomial `B(x)` over `2^j (1 + x)^{j+1}`.
pub fn p_script(n: usize) -> Result<PScriptPoly> {
    if n > P_SCRIPT_GUARD {
        return Err(Error::SizeGuard {
            what: "P-script polynomial",
            limit: P_SCRIPT_GUARD,
            got: n,
        });
    }
    // exponent -> coefficient; negative exponents allowed in between steps.
    let mut b: BTreeMap<i64, BigInt> = BTreeMap::new();
    b.insert(2 * n as i64, BigInt::one());
    for j in 0..n {
        let m = BigInt::from(j as i64 + 1);
        // B_{j+1} = (B'(1 + x) - m B) / x
        let mut next: BTreeMap<i64, BigInt> = BTreeMap::new();
        let mut add = |e: i64, c: BigInt| {
            let slot = next.entry(e).or_insert_with(BigInt::zero);
            *slot += c;
        };
        for (&e, c) in &b {
            let dc = c * BigInt::from(e);
            add(e - 2, dc.clone());
            add(e - 1, dc);
            add(e - 1, -(c * &m));
        }
        next.retain(|_, c| !c.is_zero());
        b = next;
    }
    if b.keys().next().is_some_and(|&e| e < 0) {
        return Err(Error::NonPolynomialRemainder(n));
    }
    let deg = b.keys().next_back().copied().unwrap_or(0) as usize;
    let mut coeffs = vec![BigInt::zero(); deg + 1];
    for (e, c) in b {
        coeffs[e as usize] = c;
    }
    Ok(PScriptPoly { n, coeffs })
}

/// `m_n(∞) = 2(k-1)^{n+1}/k^{2n+1} [binom(2n,n) - (k-2) k^n 𝒫_n((k-2)/k) / (2 n! (k-1)^{n+1})]`.
pub fn stationary_moments_appendix(k: u32, n_max: usize) -> Result<Vec<Rational>> {
    check_k(k)?;
    let kq = Rational::from_i64(k as i64);
    let k1 = Rational::from_i64(k as i64 - 1);
    let k2 = Rational::from_i64(k as i64 - 2);
    let x = k2.clone() / kq.clone();
    let two = Rational::from_i64(2);
    let mut factorial = Rational::one();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            factorial = factorial * Rational::from_i64(n as i64);
        }
        let p = p_script(n)?.eval(&x);
        let central = Rational::from_integer(binomial(2 * n as u64, n as i64));
        let correction =
            k2.clone() * kq.ipow(n as u32) * p / (two.clone() * factorial.clone() * k1.ipow(n as u32 + 1));
        let pref = two.clone() * k1.ipow(n as u32 + 1) / kq.ipow(2 * n as u32 + 1);
        out.push(pref * (central - correction));
    }
    Ok(out)
}

/// `m_n(∞) - m_{n+1}(∞) = (k-1)^{n+1} C_n / k^{2n+1}`.
pub fn catalan_difference(k: u32, n: usize) -> Rational {
    let kq = Rational::from_i64(k as i64);
    Rational::from_i64(k as i64 - 1).ipow(n as u32 + 1) * Rational::from_integer(catalan(n as u64))
        / kq.ipow(2 * n as u32 + 1)
}

/// `h_n = τ(T^n)` for `T = kP - 1`, `τ(P) = 1/k`, from the Binet form
/// `((k-1)^n + (-1)^n (k-1)) / k`, cross-checked against
/// `h_{n+2} = (k-2) h_{n+1} + (k-1) h_n`, `h_0 = 1`, `h_1 = 0`.
pub fn tk_trace(k: u32, n: usize) -> Result<Rational> {
    check_k(k)?;
    let kk = k as i64;
    let k1 = Rational::from_i64(kk - 1);
    let sign = if n % 2 == 0 { k1.clone() } else { -k1.clone() };
    let binet = (k1.ipow(n as u32) + sign) / Rational::from_i64(kk);

    let (mut h0, mut h1) = (BigInt::one(), BigInt::zero());
    for _ in 0..n {
        let h2 = BigInt::from(kk - 2) * &h1 + BigInt::from(kk - 1) * &h0;
        h0 = std::mem::replace(&mut h1, h2);
    }
    if Rational::from_integer(h0.clone()) != binet {
        return Err(Error::RelationViolated {
            n,
            detail: format!("Binet value {binet} differs from recurrence value {h0}"),
        });
    }
    Ok(binet)
}

/// Right end of the stationary support, `4(k-1)/k²`.
pub fn stationary_support(k: u32) -> f64 {
    let kf = k as f64;
    4.0 * (kf - 1.0) / (kf * kf)
}

/// Density of the stationary law, `√(4(k-1)x - k²x²) / (2π x (1-x))` on `[0, 4(k-1)/k²]`.
/// For `k = 2` this is the arcsine density.
pub fn stationary_density(k: u32, x: f64) -> f64 {
    let kf = k as f64;
    let b = stationary_support(k);
    if x <= 0.0 || x >= b {
        return 0.0;
    }
    (4.0 * (kf - 1.0) * x - kf * kf * x * x).sqrt() / (2.0 * std::f64::consts::PI * x * (1.0 - x))
}

/// Cumulative distribution of the stationary law.
///
/// Substituting `x = b sin²φ`, `b = 4(k-1)/k²`, turns the density into the smooth
/// integrand `(k b / π) cos²φ / (1 - b sin²φ)`, integrated by composite Simpson.
pub fn stationary_cdf(k: u32, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let b = stationary_support(k);
    if x >= b {
        return 1.0;
    }
    let kf = k as f64;
    let phi_end = (x / b).sqrt().asin();
    let f = |phi: f64| {
        let (s, c) = phi.sin_cos();
        // 1 - b sin²φ written so that k = 2 (b = 1) stays finite at φ = π/2.
        let den = c * c + (1.0 - b) * s * s;
        let ratio = if den > 0.0 { c * c / den } else { 1.0 };
        kf * b / std::f64::consts::PI * ratio
    };
    let steps = 400;
    let h = phi_end / steps as f64;
    let mut acc = f(0.0) + f(phi_end);
    for i in 1..steps {
        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}
