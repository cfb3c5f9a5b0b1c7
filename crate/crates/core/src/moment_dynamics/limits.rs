use num_traits::One;
use serde::Serialize;

use super::moments::integrate_normalized;
use super::stationary::stationary_moments_catalan;
use crate::combinatorics::catalan;
use crate::scalar::{Rational, Scalar};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct LargeKRow {
    pub k: u64,
    pub n: usize,
    /// `|r_n(t) - e^{-nt}|`.
    pub gap: f64,
    /// `k · gap`, the fitted constant in `gap <= C/k`.
    pub scaled: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LargeKReport {
    pub t: f64,
    pub rows: Vec<LargeKRow>,
    /// `max_k |gap_1 - (1 - e^{-t})/k|`.
    pub first_order_error: f64,
    /// Per order `n >= 1`: largest over smallest fitted constant along `k_list`.
    pub constant_spread: Vec<f64>,
    /// Whether the gaps shrink along `k_list` for every order.
    pub decreasing: bool,
}

/// Distance of the normalized radial moments from the `k → ∞` limit `e^{-nt}`.
pub fn large_k_limit_check(t: f64, n_max: usize, k_list: &[u64]) -> Result<LargeKReport> {
    if k_list.windows(2).any(|w| w[1] <= w[0]) || k_list.is_empty() {
        return Err(Error::InvalidParameter("k_list must be non-empty and increasing".into()));
    }
    let mut rows = Vec::new();
    let mut first_order_error = 0.0f64;
    for &k in k_list {
        let kf = k as f64;
        let r = integrate_normalized(kf, n_max, t, 0.01)?;
        let last = r.last().expect("grid is non-empty");
        for (n, &rn) in last.iter().enumerate() {
            let gap = (rn - (-(n as f64) * t).exp()).abs();
            if n == 1 {
                first_order_error = first_order_error.max((gap - (1.0 - (-t).exp()) / kf).abs());
            }
            rows.push(LargeKRow { k, n, gap, scaled: gap * kf });
        }
    }
    let mut constant_spread = Vec::new();
    let mut decreasing = true;
    for n in 1..=n_max {
        let series: Vec<&LargeKRow> = rows.iter().filter(|r| r.n == n).collect();
        let (lo, hi) = series
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.scaled), hi.max(r.scaled)));
        constant_spread.push(if t == 0.0 { 1.0 } else { hi / lo });
        decreasing &= series.windows(2).all(|w| w[1].gap <= w[0].gap);
    }
    Ok(LargeKReport {
        t,
        rows,
        first_order_error,
        constant_spread,
        decreasing,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MpRow {
    pub n: usize,
    /// Whether `4^n (1/2)_n / (n+1)! = C_n` holds exactly.
    pub identity_holds: bool,
    pub catalan: u64,
    /// `k^n m_n(∞) = k^{-n} s_n(∞)`.
    pub scaled: f64,
    pub gap: f64,
}

/// Compare rescaled stationary moments at a large `k` with the Catalan numbers,
/// the moments of the Marchenko–Pastur law of parameter one.
pub fn mp_limit_check(n_max: usize, k: u32) -> Result<Vec<MpRow>> {
    let m = stationary_moments_catalan(k, n_max)?;
    let kq = Rational::from_i64(k as i64);
    let mut poch = Rational::one();
    let mut fact = Rational::one();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            poch = poch * (Rational::from_i64(2 * n as i64 - 1) / Rational::from_i64(2));
        }
        fact = fact * Rational::from_i64(n as i64 + 1);
        let lhs = Rational::from_i64(4).ipow(n as u32) * poch.clone() / fact.clone();
        let c = Rational::from_integer(catalan(n as u64));
        let scaled = (kq.ipow(n as u32) * m[n].clone()).to_f64();
        let cf = c.to_f64();
        out.push(MpRow {
            n,
            identity_holds: lhs == c,
            catalan: cf as u64,
            scaled,
            gap: (scaled - cf).abs(),
        });
    }
    Ok(out)
}
