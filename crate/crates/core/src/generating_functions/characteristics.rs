use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use super::rho::extract_rho_moments;
use super::series::TruncatedSeries;
use crate::moment_dynamics::MomentVector;
use crate::{Error, Result};

/// `H(u) = (u+1)/(u-1)`, an involution.
pub fn h_map(u: Complex64) -> Complex64 {
    (u + 1.0) / (u - 1.0)
}

/// `λ̃_k(y) = (k² - (k-2)² y²) / 4`.
pub fn lambda_tilde(k: u32, y: Complex64) -> Complex64 {
    let kf = k as f64;
    (kf * kf - (kf - 2.0).powi(2) * y * y) / 4.0
}

/// Initial value of the curve observable in closed form, `f(0) = -(1+y)/(2 λ̃_k(y))`.
pub fn initial_f(k: u32, y: Complex64) -> Complex64 {
    -(1.0 + y) / (2.0 * lambda_tilde(k, y))
}

/// A characteristic curve of the first-order equation for `ρ̃_t = ρ_t/(k-1)`,
/// in the variable `y = H(z)`, with the observable `f(t) = ρ̃_t(z(t))`.
#[derive(Clone, Debug, Serialize)]
pub struct CharacteristicState {
    pub k: u32,
    pub y0: Complex64,
    /// `g = λ̃_k(y0) f(0)² + f(0)`.
    pub g0: Complex64,
    pub t_grid: Vec<f64>,
    pub y_path: Vec<Complex64>,
    pub z_path: Vec<Complex64>,
    pub f_path: Vec<Complex64>,
    /// `|λ̃_k(y(t)) f(t)² + f(t) - g|` at each time.
    pub drift: Vec<f64>,
    pub max_drift: f64,
    /// Set when `1 + 4 g λ̃_k(y(t))` crossed the negative real axis; the trace stops there.
    pub branch_crossed: bool,
}

impl CharacteristicState {
    /// Columns `t, re_y, im_y, re_f, im_f, drift`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re_y,im_y,re_f,im_f,drift\n");
        for i in 0..self.t_grid.len() {
            let (y, f) = (self.y_path[i], self.f_path[i]);
            let _ = writeln!(out, "{},{:e},{:e},{:e},{:e},{:e}", self.t_grid[i], y.re, y.im, f.re, f.im, self.drift[i]);
        }
        out
    }
}

/// Default truncation order of `ρ̃_t` along the curve.
pub const CHARACTERISTIC_ORDER: usize = 14;

/// Largest last-term magnitude accepted when evaluating the truncated `ρ̃_t`; two
/// orders below the drift tolerance of the conservation check.
const TAIL_TOL: f64 = 1e-8;

/// Trace the curve from `z0` up to `t_end`, reading `ρ̃_t` off the moment vector.
///
/// The moment grid must be uniform; RK4 steps span two grid intervals so that
/// the midpoint stage lands on a grid time.
pub fn characteristic_trace(k: u32, z0: Complex64, t_end: f64, m: &MomentVector) -> Result<CharacteristicState> {
    if m.n_max() < 2 {
        return Err(Error::OrderMismatch { expected: 2, got: m.n_max() });
    }
    let rho = extract_rho_moments(m, k)?;
    let order = m.n_max().min(CHARACTERISTIC_ORDER);
    let scale = 1.0 / (k as f64 - 1.0);
    let tilde: Vec<TruncatedSeries<f64>> = rho.series.iter().map(|s| s.truncate(order).scale(&scale)).collect();

    let grid = &m.t_grid;
    if grid.len() < 3 {
        return Err(Error::InvalidGrid("characteristic tracing needs at least three times".into()));
    }
    let dt = grid[1] - grid[0];
    if grid.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt) {
        return Err(Error::InvalidGrid("moment grid must be uniform".into()));
    }
    let steps = ((t_end / (2.0 * dt)) + 1e-9).floor() as usize;
    if 2 * steps >= grid.len() || steps == 0 {
        return Err(Error::InvalidGrid(format!("moment grid does not reach t = {t_end}")));
    }

    let kf = k as f64;
    let f_at = |i: usize, y: Complex64| tilde[i].eval_checked(h_map(y), TAIL_TOL);
    let rhs = |i: usize, y: Complex64| -> Result<Complex64> {
        let f = f_at(i, y)?;
        Ok((1.0 - y * y) / 2.0 * (1.0 + (kf * kf - (kf - 2.0).powi(2) * y * y) / 2.0 * f))
    };

    let y0 = h_map(z0);
    let f0 = f_at(0, y0)?;
    let g0 = lambda_tilde(k, y0) * f0 * f0 + f0;
    let branch_arg = |y: Complex64| 1.0 + 4.0 * g0 * lambda_tilde(k, y);

    let mut st = CharacteristicState {
        k,
        y0,
        g0,
        t_grid: vec![0.0],
        y_path: vec![y0],
        z_path: vec![z0],
        f_path: vec![f0],
        drift: vec![0.0],
        max_drift: 0.0,
        branch_crossed: false,
    };
    let mut y = y0;
    let mut prev_arg = branch_arg(y0);
    let h = 2.0 * dt;
    for s in 0..steps {
        let i = 2 * s;
        let k1 = rhs(i, y)?;
        let k2 = rhs(i + 1, y + 0.5 * h * k1)?;
        let k3 = rhs(i + 1, y + 0.5 * h * k2)?;
        let k4 = rhs(i + 2, y + h * k3)?;
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        let arg = branch_arg(y);
        let crossed = arg.re < 0.0 && (arg.im == 0.0 || arg.im.signum() != prev_arg.im.signum());
        if crossed {
            st.branch_crossed = true;
            break;
        }
        prev_arg = arg;

        let f = f_at(i + 2, y)?;
        let drift = (lambda_tilde(k, y) * f * f + f - g0).norm();
        st.t_grid.push(grid[i + 2]);
        st.y_path.push(y);
        st.z_path.push(h_map(y));
        st.f_path.push(f);
        st.drift.push(drift);
        st.max_drift = st.max_drift.max(drift);
    }
    Ok(st)
}

/// `z_2(t) = z e^{t(1+z)/(1-z)}`, the explicit curve for `k = 2`.
pub fn k2_curve(z0: Complex64, t: f64) -> Complex64 {
    z0 * (t * (1.0 + z0) / (1.0 - z0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generating_functions::rho0_series;
    use crate::moment_dynamics::{integrate_moments, JacobiParams};

    #[test]
    fn h_is_involution() {
        let u = Complex64::new(0.3, -0.7);
        assert!((h_map(h_map(u)) - u).norm() < 1e-15);
    }

    #[test]
    fn initial_value_closed_form() {
        for k in [2u32, 3, 4] {
            let r = rho0_series::<f64>(k, 30).unwrap().scale(&(1.0 / (k as f64 - 1.0)));
            for z in [Complex64::new(0.05, 0.0), Complex64::new(0.0, 0.1)] {
                let f = r.eval_complex(z);
                assert!((f - initial_f(k, h_map(z))).norm() < 1e-13, "k={k} z={z}");
            }
        }
    }

    #[test]
    fn k2_follows_explicit_curve() {
        let mv = integrate_moments(&JacobiParams::for_k(2, 14), 0.5, 5e-3).unwrap();
        let z0 = Complex64::new(0.05, 0.0);
        let st = characteristic_trace(2, z0, 0.5, &mv).unwrap();
        assert!(!st.branch_crossed);
        assert_eq!(st.t_grid.len(), 51);
        for (t, z) in st.t_grid.iter().zip(&st.z_path) {
            assert!((z - k2_curve(z0, *t)).norm() < 1e-8, "t={t}");
        }
        assert!(st.max_drift < 1e-6);
        assert!(st.to_csv().starts_with("t,re_y,im_y,re_f,im_f,drift\n0,"));
    }

    #[test]
    fn grid_must_reach_end() {
        let mv = integrate_moments(&JacobiParams::for_k(3, 6), 0.2, 0.01).unwrap();
        assert!(characteristic_trace(3, Complex64::new(0.05, 0.0), 0.5, &mv).is_err());
    }
}
