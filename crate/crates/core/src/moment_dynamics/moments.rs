use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ode::{integrate, uniform_grid, OdeOptions};
use crate::{Error, Result};

/// Parameters of a free Jacobi process `PUQU*P` with `τ(Q) = θ`, `τ(P) = λθ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    /// Number of averaged unitaries when the process comes from `θ = 1/k, λ = 1`.
    pub k: Option<u32>,
    pub lambda: f64,
    pub theta: f64,
    pub n_max: usize,
    /// `m_0(0), ..., m_{n_max}(0)`.
    pub init: Vec<f64>,
}

impl JacobiParams {
    /// `θ = 1/k`, `λ = 1` and `m_n(0) = 1` (the case `P = Q`).
    pub fn for_k(k: u32, n_max: usize) -> Self {
        Self {
            k: Some(k),
            lambda: 1.0,
            theta: 1.0 / k as f64,
            n_max,
            init: vec![1.0; n_max + 1],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n_max == 0 {
            return bad("n_max must be at least 1".into());
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) || !(self.theta > 0.0 && self.theta <= 1.0) {
            return bad(format!("lambda = {}, theta = {} must lie in (0, 1]", self.lambda, self.theta));
        }
        if self.lambda * self.theta > 1.0 {
            return bad("lambda * theta exceeds 1".into());
        }
        if self.init.len() != self.n_max + 1 {
            return bad(format!("init has {} entries, expected {}", self.init.len(), self.n_max + 1));
        }
        if self.init[0] != 1.0 {
            return bad(format!("init[0] = {} must be 1", self.init[0]));
        }
        if let Some(k) = self.k {
            if k < 2 {
                return bad(format!("k = {k} must be at least 2"));
            }
        }
        Ok(())
    }
}

/// Which moment family a [`MomentVector`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentKind {
    /// `m_n(t) = τ(J_t^n)/τ(P)`.
    Jacobi,
    /// `r_n(t) = τ[(W_t/k²)^n]`.
    RadialNormalized,
    /// `s_n(t) = τ(W_t^n)`.
    Radial,
}

/// Time-indexed moments `values[i][n]` at `t_grid[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    pub kind: MomentKind,
    pub params: JacobiParams,
    pub t_grid: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    /// Largest excursion of any `m_n(t)`, `n >= 1`, outside `[0, 1]` (zero for `Radial`).
    pub bound_violation: f64,
}

/// Excursions larger than this are reported by [`MomentVector::flagged`].
pub const BOUND_TOLERANCE: f64 = 1e-9;

impl MomentVector {
    fn new(kind: MomentKind, params: JacobiParams, t_grid: Vec<f64>, values: Vec<Vec<f64>>) -> Self {
        let bound_violation = if kind == MomentKind::Radial {
            0.0
        } else {
            values
                .iter()
                .flat_map(|row| row.iter().skip(1))
                .map(|&v| (-v).max(v - 1.0).max(0.0))
                .fold(0.0, f64::max)
        };
        Self {
            kind,
            params,
            t_grid,
            values,
            bound_violation,
        }
    }

    pub fn n_max(&self) -> usize {
        self.values.first().map_or(0, |r| r.len() - 1)
    }

    pub fn flagged(&self) -> bool {
        self.bound_violation > BOUND_TOLERANCE
    }

    /// Moments at the grid point closest to `t`.
    pub fn at_time(&self, t: f64) -> (f64, &[f64]) {
        let i = self.index_near(t);
        (self.t_grid[i], &self.values[i])
    }

    pub fn index_near(&self, t: f64) -> usize {
        let i = self.t_grid.partition_point(|&s| s < t);
        if i == 0 {
            0
        } else if i == self.t_grid.len() || (t - self.t_grid[i - 1]) <= (self.t_grid[i] - t) {
            i - 1
        } else {
            i
        }
    }

    /// Time series of one order.
    pub fn order(&self, n: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[n]).collect()
    }

    pub fn last(&self) -> &[f64] {
        self.values.last().expect("moment vectors hold at least one time")
    }

    /// Columns `t, m_0, ..., m_N`.
    pub fn to_csv(&self) -> String {
        let prefix = match self.kind {
            MomentKind::Jacobi => "m",
            MomentKind::RadialNormalized => "r",
            MomentKind::Radial => "s",
        };
        let mut out = String::from("t");
        for n in 0..=self.n_max() {
            let _ = write!(out, ",{prefix}_{n}");
        }
        out.push('\n');
        for (t, row) in self.t_grid.iter().zip(&self.values) {
            let _ = write!(out, "{t}");
            for v in row {
                let _ = write!(out, ",{v:e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// `m_n' = -n m_n + nθ m_{n-1} + nλθ Σ_{j=0}^{n-2} m_{n-j-1}(m_j - m_{j+1})`.
fn jacobi_rhs(lambda: f64, theta: f64) -> impl Fn(&[f64], &mut [f64]) {
    move |m, d| {
        d[0] = 0.0;
        for n in 1..m.len() {
            let sum: f64 = (0..n.saturating_sub(1)).map(|j| m[n - j - 1] * (m[j] - m[j + 1])).sum();
            let nf = n as f64;
            d[n] = -nf * m[n] + nf * theta * m[n - 1] + nf * lambda * theta * sum;
        }
    }
}

/// `s_n' = -n s_n + nk s_{n-1} + nk Σ s_{n-j-1} s_j - (n/k) Σ s_{n-j-1} s_{j+1}`, sums over `0..=n-2`.
fn radial_rhs(k: f64) -> impl Fn(&[f64], &mut [f64]) {
    move |s, d| {
        d[0] = 0.0;
        for n in 1..s.len() {
            let (mut a, mut b) = (0.0, 0.0);
            for j in 0..n.saturating_sub(1) {
                a += s[n - j - 1] * s[j];
                b += s[n - j - 1] * s[j + 1];
            }
            let nf = n as f64;
            d[n] = -nf * s[n] + nf * k * s[n - 1] + nf * k * a - nf / k * b;
        }
    }
}

/// `r_n' = -n r_n + (n/k) r_{n-1} + (n/k) Σ_{j=0}^{n-2} r_{n-j-1}(r_j - r_{j+1})`.
fn normalized_rhs(k: f64) -> impl Fn(&[f64], &mut [f64]) {
    move |r, d| {
        d[0] = 0.0;
        for n in 1..r.len() {
            let sum: f64 = (0..n.saturating_sub(1)).map(|j| r[n - j - 1] * (r[j] - r[j + 1])).sum();
            let nf = n as f64;
            d[n] = -nf * r[n] + nf / k * r[n - 1] + nf / k * sum;
        }
    }
}

/// Integrate the Jacobi moment system on a uniform grid of spacing at most `dt_hint`.
pub fn integrate_moments(p: &JacobiParams, t_end: f64, dt_hint: f64) -> Result<MomentVector> {
    integrate_moments_with(p, t_end, dt_hint, OdeOptions::default())
}

pub fn integrate_moments_with(
    p: &JacobiParams,
    t_end: f64,
    dt_hint: f64,
    opts: OdeOptions,
) -> Result<MomentVector> {
    p.validate()?;
    let grid = uniform_grid(t_end, dt_hint)?;
    let values = integrate(jacobi_rhs(p.lambda, p.theta), &p.init, &grid, opts)?;
    Ok(MomentVector::new(MomentKind::Jacobi, p.clone(), grid, values))
}

/// Normalized radial moments integrated directly in the `r_n` form.
pub fn integrate_normalized(k: f64, n_max: usize, t_end: f64, dt_hint: f64) -> Result<Vec<Vec<f64>>> {
    if k < 2.0 {
        return Err(Error::InvalidParameter(format!("k = {k} must be at least 2")));
    }
    let grid = uniform_grid(t_end, dt_hint)?;
    integrate(normalized_rhs(k), &vec![1.0; n_max + 1], &grid, OdeOptions::default())
}

/// Radial moments `s_n` and their normalization `r_n = s_n / k^{2n}`.
#[derive(Clone, Debug)]
pub struct RadialMoments {
    pub s: MomentVector,
    pub r: MomentVector,
    /// Largest mismatch between `s_n'/k^{2n}` and the `r_n` equation evaluated at `r`.
    pub residual: f64,
}

/// Largest residual tolerated by [`integrate_w_moments`].
pub const RADIAL_RESIDUAL_LIMIT: f64 = 1e-9;

/// Integrate the `s_n` system from `s_n(0) = k^{2n}` and check the normalized form.
pub fn integrate_w_moments(k: u32, n_max: usize, t_end: f64, dt_hint: f64) -> Result<RadialMoments> {
    let params = JacobiParams::for_k(k, n_max);
    params.validate()?;
    let kf = k as f64;
    let grid = uniform_grid(t_end, dt_hint)?;
    let s0: Vec<f64> = (0..=n_max).map(|n| kf.powi(2 * n as i32)).collect();
    let s = integrate(radial_rhs(kf), &s0, &grid, OdeOptions::default())?;
    let r: Vec<Vec<f64>> = s
        .iter()
        .map(|row| row.iter().zip(&s0).map(|(v, scale)| v / scale).collect())
        .collect();

    let (fs, fr) = (radial_rhs(kf), normalized_rhs(kf));
    let mut ds = vec![0.0; n_max + 1];
    let mut dr = vec![0.0; n_max + 1];
    let mut residual = 0.0f64;
    for (srow, rrow) in s.iter().zip(&r) {
        fs(srow, &mut ds);
        fr(rrow, &mut dr);
        for n in 0..=n_max {
            residual = residual.max((ds[n] / s0[n] - dr[n]).abs());
        }
    }
    if residual > RADIAL_RESIDUAL_LIMIT {
        return Err(Error::Residual {
            what: "normalized radial moment equation",
            value: residual,
            limit: RADIAL_RESIDUAL_LIMIT,
        });
    }
    Ok(RadialMoments {
        s: MomentVector::new(MomentKind::Radial, params.clone(), grid.clone(), s),
        r: MomentVector::new(MomentKind::RadialNormalized, params, grid, r),
        residual,
    })
}

/// Moments of the complementary process `(1-P)U(1-P)U*(1-P)` normalized by `τ(1-P) = (k-1)/k`,
/// from those of `PUPU*P` with `τ(P) = 1/k`: `m'_n = (m_n + k - 2)/(k - 1)` for `n >= 1`.
pub fn complement_moments(m: &MomentVector) -> Result<MomentVector> {
    let k = match m.params.k {
        Some(k) if m.kind == MomentKind::Jacobi && m.params.lambda == 1.0 => k,
        _ => {
            return Err(Error::InvalidParameter(
                "complement requires Jacobi moments with theta = 1/k, lambda = 1".into(),
            ))
        }
    };
    let kf = k as f64;
    let map = |row: &[f64]| -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(n, &v)| if n == 0 { 1.0 } else { (v + kf - 2.0) / (kf - 1.0) })
            .collect()
    };
    let params = JacobiParams {
        k: Some(k),
        lambda: 1.0,
        theta: (kf - 1.0) / kf,
        n_max: m.params.n_max,
        init: map(&m.params.init),
    };
    let values = m.values.iter().map(|r| map(r)).collect();
    Ok(MomentVector::new(MomentKind::Jacobi, params, m.t_grid.clone(), values))
}
