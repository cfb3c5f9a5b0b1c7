use num_complex::Complex64;
use serde::Serialize;

use super::maps::{
    alpha_map, binomial_transfer, inverse_binomial_transfer, pde_prefactor, stationary_mgf_value,
};
use super::series::TruncatedSeries;
use crate::moment_dynamics::{stationary_moments_catalan, MomentKind, MomentVector};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Generating series `ρ_t(z) = Σ_j w_j(t) z^j / (k-1)^j` of `w_j = τ[(T U_t T U_t*)^j]`
/// at each time of a moment vector.
#[derive(Clone, Debug, Serialize)]
pub struct RhoPath {
    pub k: u32,
    pub t_grid: Vec<f64>,
    pub series: Vec<TruncatedSeries<f64>>,
}

impl RhoPath {
    /// `w_j(t)` at grid index `i`.
    pub fn w(&self, i: usize, j: usize) -> f64 {
        self.series[i].coeff(j) * ((self.k - 1) as f64).powi(j as i32)
    }
}

fn check_moments(m: &MomentVector, k: u32) -> Result<()> {
    let tagged_k = m.params.k == Some(k);
    let jacobi = m.kind == MomentKind::Jacobi
        && m.params.lambda == 1.0
        && (m.params.theta - 1.0 / k as f64).abs() < 1e-15;
    if !tagged_k || !(jacobi || m.kind == MomentKind::RadialNormalized) {
        return Err(Error::InvalidParameter(format!(
            "moments are not tagged for theta = 1/{k}, lambda = 1"
        )));
    }
    if m.n_max() < 1 {
        return Err(Error::OrderMismatch { expected: 1, got: m.n_max() });
    }
    Ok(())
}

/// Scale `k^{2n-1} / (k-1)^n` turning `m_n - m_n(∞)` into `Σ_j binom(2n, n-j) a_j`.
fn transfer_scale(k: u32, n: usize) -> f64 {
    let kf = k as f64;
    kf.powi(2 * n as i32 - 1) / (kf - 1.0).powi(n as i32)
}

fn stationary_f64(k: u32, n_max: usize) -> Result<Vec<f64>> {
    Ok(stationary_moments_catalan(k, n_max)?.iter().map(Scalar::to_f64).collect())
}

/// Recover `ρ_t` from the moments by inverting
/// `m_n(t) = m_n(∞) + k^{1-2n} Σ_{j=1}^n (k-1)^{n-j} binom(2n, n-j) w_j(t)`.
pub fn extract_rho_moments(m: &MomentVector, k: u32) -> Result<RhoPath> {
    check_moments(m, k)?;
    let n_max = m.n_max();
    let stat = stationary_f64(k, n_max)?;
    let series = m
        .values
        .iter()
        .map(|row| {
            let b: Vec<f64> = (0..=n_max)
                .map(|n| if n == 0 { 0.0 } else { (row[n] - stat[n]) * transfer_scale(k, n) })
                .collect();
            inverse_binomial_transfer(&TruncatedSeries::new(b, n_max))
        })
        .collect();
    Ok(RhoPath {
        k,
        t_grid: m.t_grid.clone(),
        series,
    })
}

/// Forward map: moments `m_0..m_N` from the coefficients of `ρ_t`.
pub fn moments_from_rho(rho: &TruncatedSeries<f64>, k: u32) -> Result<Vec<f64>> {
    let n_max = rho.order();
    let stat = stationary_f64(k, n_max)?;
    let b = binomial_transfer(rho);
    Ok((0..=n_max)
        .map(|n| if n == 0 { 1.0 } else { stat[n] + b.coeff(n) / transfer_scale(k, n) })
        .collect())
}

/// Generalized Laguerre polynomial `L_n^{(α)}(x)` by the three-term recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 + alpha - x);
    if n == 0 {
        return prev;
    }
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - x) * cur - (jf + alpha) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `η_t(z) = Σ_{n>=1} L_{n-1}^{(1)}(2nt) z^n / n`.
pub fn eta_t2(t: f64, order: usize) -> TruncatedSeries<f64> {
    let coeffs = (0..=order)
        .map(|n| if n == 0 { 0.0 } else { laguerre(n - 1, 1.0, 2.0 * n as f64 * t) / n as f64 })
        .collect();
    TruncatedSeries::new(coeffs, order)
}

/// `ρ_t(z) = η_t(e^{-t} z)` for `k = 2`.
pub fn rho_t2_laguerre(t: f64, order: usize) -> TruncatedSeries<f64> {
    let eta = eta_t2(t, order);
    let coeffs = (0..=order).map(|n| eta.coeff(n) * (-(n as f64) * t).exp()).collect();
    TruncatedSeries::new(coeffs, order)
}

/// Maximum coefficient residual of a time-dependent equation `∂_t S = F(S)`.
#[derive(Clone, Debug, Serialize)]
pub struct PdeResidual {
    /// `per_order[n]` is the largest `|∂_t S_n - F(S)_n|` over the usable snapshots.
    pub per_order: Vec<f64>,
    pub max: f64,
    /// Times at which the time derivative could be formed.
    pub times: Vec<f64>,
}

fn check_uniform(times: &[f64]) -> Result<f64> {
    if times.len() < 3 {
        return Err(Error::InvalidGrid(format!("{} snapshots, need at least 3", times.len())));
    }
    let h = times[1] - times[0];
    if !(h > 0.0) || times.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(Error::InvalidGrid("snapshots must be equally spaced in time".into()));
    }
    Ok(h)
}

/// Central differences in time (fourth order with five or more snapshots,
/// second order otherwise) against `rhs`, through coefficient `max_order`.
pub fn time_residual<F>(
    snapshots: &[TruncatedSeries<f64>],
    times: &[f64],
    max_order: usize,
    rhs: F,
) -> Result<PdeResidual>
where
    F: Fn(&TruncatedSeries<f64>) -> Result<TruncatedSeries<f64>>,
{
    if snapshots.len() != times.len() {
        return Err(Error::InvalidGrid("one time per snapshot required".into()));
    }
    let h = check_uniform(times)?;
    let order = snapshots[0].order();
    if snapshots.iter().any(|s| s.order() != order) {
        return Err(Error::OrderMismatch {
            expected: order,
            got: snapshots.iter().map(TruncatedSeries::order).find(|&o| o != order).unwrap_or(order),
        });
    }
    if max_order > order {
        return Err(Error::OrderMismatch { expected: max_order, got: order });
    }
    let wide = snapshots.len() >= 5;
    let reach = if wide { 2 } else { 1 };
    let mut per_order = vec![0.0f64; max_order + 1];
    let mut used = Vec::new();
    for i in reach..snapshots.len() - reach {
        let f = rhs(&snapshots[i])?;
        for (n, slot) in per_order.iter_mut().enumerate() {
            let c = |j: usize| snapshots[j].coeff(n);
            let dt = if wide {
                (c(i - 2) - 8.0 * c(i - 1) + 8.0 * c(i + 1) - c(i + 2)) / (12.0 * h)
            } else {
                (c(i + 1) - c(i - 1)) / (2.0 * h)
            };
            *slot = slot.max((dt - f.coeff(n)).abs());
        }
        used.push(times[i]);
    }
    let max = per_order.iter().copied().fold(0.0, f64::max);
    Ok(PdeResidual { per_order, max, times: used })
}

/// Residual of `∂_t ρ = -z ∂_z [ρ + c(z) ρ²]` with
/// `c = (4(k-1) - k² α^{-1}(z)) / (4(k-1)(1 - α^{-1}(z)))`, through order `N - 2`.
pub fn pde0_residual(snapshots: &[TruncatedSeries<f64>], times: &[f64], k: u32) -> Result<PdeResidual> {
    let order = snapshots.first().map_or(0, TruncatedSeries::order);
    if order < 2 {
        return Err(Error::OrderMismatch { expected: 2, got: order });
    }
    let c = pde_prefactor::<f64>(k, order)?;
    time_residual(snapshots, times, order - 2, |rho| {
        let inner = rho.add(&c.mul(&rho.mul(rho)?)?)?;
        Ok(inner.euler().scale(&-1.0))
    })
}

/// Residual of `∂_t M = -(z/k) ∂_z [(k-2) M + (1-z) M²]` for `M = Σ m_n z^n`.
pub fn pde1_residual(m: &MomentVector, k: u32, indices: std::ops::Range<usize>) -> Result<PdeResidual> {
    let n_max = m.n_max();
    let snaps: Vec<TruncatedSeries<f64>> = m.values[indices.clone()]
        .iter()
        .map(|row| TruncatedSeries::new(row.clone(), n_max))
        .collect();
    let kf = k as f64;
    let one_minus_z = TruncatedSeries::new(vec![1.0, -1.0], n_max);
    time_residual(&snaps, &m.t_grid[indices], n_max, |mm| {
        let inner = mm.scale(&(kf - 2.0)).add(&one_minus_z.mul(&mm.mul(mm)?)?)?;
        Ok(inner.euler().scale(&(-1.0 / kf)))
    })
}

/// Residual of `∂_t η = -z ∂_z [η²]` for the Laguerre series at `times`.
pub fn pde2_residual(times: &[f64], order: usize) -> Result<PdeResidual> {
    let snaps: Vec<_> = times.iter().map(|&t| eta_t2(t, order)).collect();
    time_residual(&snaps, times, order, |eta| Ok(eta.mul(eta)?.euler().scale(&-1.0)))
}

/// Largest `|M_t(z) - M_∞(z) - k²/√(k² - 4(k-1)z) · ρ_t(α(4(k-1)z/k²))|` over the
/// grid times and `z_samples`, with `M_t(z) = Σ m_n(t) z^n`.
pub fn mgf_relation_check(m: &MomentVector, k: u32, z_samples: &[Complex64]) -> Result<f64> {
    let rho = extract_rho_moments(m, k)?;
    let kf = k as f64;
    let tail_tol = 1e-9;
    let mut gap = 0.0f64;
    for (row, rho_t) in m.values.iter().zip(&rho.series) {
        let direct = TruncatedSeries::new(row.clone(), m.n_max());
        for &z in z_samples {
            if z.norm() >= 1.0 {
                return Err(Error::SeriesDivergence { radius: z.norm(), tail: f64::INFINITY });
            }
            let lhs = direct.eval_checked(z, tail_tol)?;
            let w = 4.0 * (kf - 1.0) * z / (kf * kf);
            let root = (Complex64::new(kf * kf, 0.0) - 4.0 * (kf - 1.0) * z).sqrt();
            let rhs = stationary_mgf_value(k, z) + kf * kf / root * rho_t.eval_checked(alpha_map(w)?, tail_tol)?;
            gap = gap.max((lhs - rhs).norm());
        }
    }
    Ok(gap)
}
