use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::artifacts::{emit_plot_data, write_atomic, Check, PlotInput};
use super::config::*;
use crate::combinatorics::{catalan, cumulants_from_moments, projection_cumulants, CumulantTable};
use crate::generating_functions::{
    characteristic_trace, extract_rho_moments, CHARACTERISTIC_ORDER, k2_curve, mgf_relation_check, moments_from_rho,
    pde0_residual, pde1_residual, rho0_series, PdeResidual,
};
use crate::matrix_sim::{simulate, SimConfig, SimResult, SimSnapshot, SpectrumKind};
use crate::moment_dynamics::{
    catalan_difference, complement_moments, integrate_moments, integrate_normalized, integrate_w_moments,
    mp_limit_check, stationary_cdf, stationary_density, stationary_moments_appendix,
    stationary_moments_catalan, stationary_support, JacobiParams, MomentVector, BOUND_TOLERANCE,
};
use crate::scalar::{parse_rational, rational, rational_to_string, Rational, Scalar};
use crate::word_algebra::{stationary_from_words, triangle_csv, verify_expansion};
use crate::{Error, Result};

/// Checks performed and files written by one pipeline.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Outcome {
    pub checks: Vec<Check>,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn write(&mut self, dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        write_atomic(dir, name, contents.as_ref())?;
        self.outputs.push(name.to_string());
        Ok(())
    }
}

pub(crate) fn execute(spec: &ExperimentSpec) -> Result<Outcome> {
    let dir = spec.output_dir.as_path();
    let tol = spec.tolerance;
    match &spec.params {
        Params::Moments(p) => moments(p, tol, dir),
        Params::Stationary(p) => stationary(p, dir),
        Params::ExpansionVerify(p) => expansion(p, dir),
        Params::Cumulants(p) => cumulants(p, dir),
        Params::MgfCheck(p) => mgf_check(p, tol, dir),
        Params::Characteristics(p) => characteristics(p, tol, dir),
        Params::Simulate(p) => simulate_cmd(p, spec.seed, tol, dir),
        Params::FullVerify(p) => full_verify(p, spec.seed, tol, dir),
    }
}

fn jacobi_params(k: u32, n_max: usize, lambda: Option<f64>, theta: Option<f64>) -> JacobiParams {
    let mut jp = JacobiParams::for_k(k, n_max);
    if let Some(l) = lambda {
        jp.lambda = l;
    }
    if let Some(t) = theta {
        jp.theta = t;
    }
    if jp.lambda != 1.0 || (jp.theta - 1.0 / k as f64).abs() > 1e-15 {
        jp.k = None;
    }
    jp
}

fn first_moment_check(m: &MomentVector) -> Check {
    let theta = m.params.theta;
    let m10 = m.params.init[1];
    let gap = m
        .t_grid
        .iter()
        .zip(&m.values)
        .map(|(&t, row)| (row[1] - (theta + (m10 - theta) * (-t).exp())).abs())
        .fold(0.0, f64::max);
    Check::at_most("first moment matches theta + (m_1(0) - theta) e^{-t}", gap, 1e-10)
}

/// Largest gap between `m_n(t)` and `s_n(t)/k^{2n}` from the unnormalized radial system.
fn radial_gap(m: &MomentVector, k: u32) -> Result<f64> {
    let t_end = *m.t_grid.last().unwrap_or(&0.0);
    let dt = m.t_grid.get(1).map_or(t_end, |t| *t);
    let r = integrate_w_moments(k, m.n_max(), t_end, dt)?.r;
    let gap = m
        .values
        .iter()
        .zip(&r.values)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    Ok(gap)
}

fn moment_checks(m: &MomentVector, tol: f64) -> Result<Vec<Check>> {
    let mut checks = vec![
        Check::at_most("moments stay in [0, 1]", m.bound_violation, BOUND_TOLERANCE),
        first_moment_check(m),
    ];
    let decreasing = m
        .values
        .iter()
        .flat_map(|row| row.windows(2).skip(1).map(|w| w[1] - w[0]))
        .fold(0.0, f64::max);
    checks.push(Check::at_most("m_{n+1} <= m_n", decreasing, BOUND_TOLERANCE));
    if let Some(k) = m.params.k {
        checks.push(Check::at_most(
            "Jacobi and normalized radial systems coincide",
            radial_gap(m, k)?,
            tol,
        ));
    }
    Ok(checks)
}

fn moments(p: &MomentsParams, tol: Option<f64>, dir: &Path) -> Result<Outcome> {
    let jp = jacobi_params(p.k, p.n_max, p.lambda, p.theta);
    let m = integrate_moments(&jp, p.t_end, p.dt)?;
    let mut out = Outcome {
        checks: moment_checks(&m, tol.unwrap_or(1e-9))?,
        ..Outcome::default()
    };
    out.write(dir, "moments.csv", m.to_csv())?;
    out.write(dir, "moments.json", m.to_json()?)?;
    out.write(dir, "moment_vs_t.csv", emit_plot_data(&PlotInput::MomentVsT { ode: &m, mc: None })?)?;
    Ok(out)
}

fn stationary_routes(k: u32, n_max: usize) -> Result<(Vec<Check>, String)> {
    let cat = stationary_moments_catalan(k, n_max)?;
    let app = stationary_moments_appendix(k, n_max)?;
    let kr = Rational::from_i64(k.into());
    let mut words = vec![Rational::one()];
    for n in 1..=n_max {
        let m = stationary_from_words(n)?.eval_rational(&kr);
        words.push(m / kr.ipow(2 * n as u32 - 1));
    }
    let mut csv = String::from("n,catalan_route,appendix_route,word_route,value\n");
    let mut mismatch = Vec::new();
    let mut diff_fail = Vec::new();
    for n in 0..=n_max {
        if cat[n] != app[n] || cat[n] != words[n] {
            mismatch.push(n);
        }
        if n < n_max && &cat[n] - &cat[n + 1] != catalan_difference(k, n) {
            diff_fail.push(n);
        }
        let _ = writeln!(
            csv,
            "{n},{},{},{},{}",
            rational_to_string(&cat[n]),
            rational_to_string(&app[n]),
            rational_to_string(&words[n]),
            cat[n].to_f64()
        );
    }
    let checks = vec![
        Check::exact(
            format!("stationary moments agree by three routes (k = {k})"),
            mismatch.is_empty(),
            if mismatch.is_empty() { String::new() } else { format!("orders {mismatch:?}") },
        ),
        Check::exact(
            format!("Catalan difference law (k = {k})"),
            diff_fail.is_empty(),
            if diff_fail.is_empty() { String::new() } else { format!("orders {diff_fail:?}") },
        ),
    ];
    Ok((checks, csv))
}

fn stationary(p: &StationaryParams, dir: &Path) -> Result<Outcome> {
    if p.k < 2 {
        return Err(Error::InvalidParameter(format!("k = {} must be at least 2", p.k)));
    }
    let (checks, csv) = stationary_routes(p.k, p.n_max)?;
    let mut out = Outcome { checks, ..Outcome::default() };
    out.write(dir, "stationary_moments.csv", csv)?;
    let b = stationary_support(p.k);
    let bins = p.bins.max(1);
    let mut dens = String::from("x,density,cdf\n");
    for i in 0..=bins {
        let x = b * i as f64 / bins as f64;
        let _ = writeln!(dens, "{x},{},{}", stationary_density(p.k, x), stationary_cdf(p.k, x));
    }
    out.write(dir, "stationary_density.csv", dens)?;
    Ok(out)
}

fn expansion(p: &ExpansionParams, dir: &Path) -> Result<Outcome> {
    let rep = verify_expansion(p.n_max)?;
    let mut checks = vec![Check::at_most(
        format!("{} exact identities for n <= {}", rep.checks, p.n_max),
        rep.failures.len() as f64,
        0.0,
    )];
    checks.extend(rep.failures.iter().map(|f| Check::exact("identity", false, f.clone())));
    let mut out = Outcome { checks, ..Outcome::default() };
    out.write(dir, "k_triangle.csv", triangle_csv(&rep.k_triangle, 1))?;
    out.write(dir, "c_triangle.csv", triangle_csv(&rep.c_triangle, 1))?;
    out.write(dir, "expansion_report.json", serde_json::to_string_pretty(&rep)?)?;
    Ok(out)
}

fn cumulant_checks(alpha: &Rational, n_max: usize) -> Result<(Vec<Check>, CumulantTable, CumulantTable)> {
    let closed = projection_cumulants(alpha, n_max)?;
    let mut moments = vec![Rational::one()];
    moments.extend(std::iter::repeat(alpha.clone()).take(n_max));
    let oracle = cumulants_from_moments(&moments)?;
    let diff: Vec<usize> = (1..=n_max).filter(|&n| closed.get(n).ok() != oracle.get(n).ok()).collect();
    let a = rational_to_string(alpha);
    let mut checks = vec![Check::exact(
        format!("projection cumulants, alpha = {a}: Legendre formula equals Mobius inversion"),
        diff.is_empty(),
        if diff.is_empty() { String::new() } else { format!("orders {diff:?}") },
    )];
    if *alpha == rational(1, 2) {
        // κ_{2j+1} = δ_{j0}/2, κ_{2j} = (-1)^{j-1} C_{j-1} / 4^j
        let bad: Vec<usize> = (1..=n_max)
            .filter(|&n| {
                let want = if n % 2 == 1 {
                    if n == 1 { rational(1, 2) } else { Rational::zero() }
                } else {
                    let j = n / 2;
                    let sign = if j % 2 == 1 { 1 } else { -1 };
                    Rational::new(catalan(j as u64 - 1) * sign, num_bigint::BigInt::from(4u32).pow(j as u32))
                };
                closed.get(n).ok() != Some(&want)
            })
            .collect();
        checks.push(Check::exact(
            "alpha = 1/2 cumulants match the Catalan closed form",
            bad.is_empty(),
            if bad.is_empty() { String::new() } else { format!("orders {bad:?}") },
        ));
    }
    Ok((checks, closed, oracle))
}

fn cumulants(p: &CumulantParams, dir: &Path) -> Result<Outcome> {
    let alpha = parse_rational(&p.alpha).map_err(|e| Error::Config(e.to_string()))?;
    let (checks, closed, oracle) = cumulant_checks(&alpha, p.n_max)?;
    let mut out = Outcome { checks, ..Outcome::default() };
    let mut csv = String::from("n,legendre,mobius,value\n");
    for n in 1..=p.n_max {
        let (a, b) = (closed.get(n)?, oracle.get(n)?);
        let _ = writeln!(csv, "{n},{},{},{}", rational_to_string(a), rational_to_string(b), a.to_f64());
    }
    out.write(dir, "cumulants.csv", csv)?;
    out.write(dir, "cumulants.json", closed.to_json()?)?;
    Ok(out)
}

/// Five consecutive `ρ_t` snapshots centred on the grid time nearest `t`.
fn pde0_at(m: &MomentVector, k: u32, t: f64) -> Result<PdeResidual> {
    let rho = extract_rho_moments(m, k)?;
    let i = m.index_near(t);
    if i < 2 || i + 2 >= m.t_grid.len() {
        return Err(Error::InvalidGrid(format!("t = {t} is too close to the end of the grid")));
    }
    pde0_residual(&rho.series[i - 2..=i + 2], &m.t_grid[i - 2..=i + 2], k)
}

fn rho_checks(m: &MomentVector, k: u32, times: &[f64], pde_tol: f64) -> Result<(Vec<Check>, Vec<(String, PdeResidual)>)> {
    let rho = extract_rho_moments(m, k)?;
    let round_trip = rho
        .series
        .iter()
        .zip(&m.values)
        .map(|(s, row)| {
            moments_from_rho(s, k).map(|back| back.iter().zip(row).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let r0 = rho0_series::<Rational>(k, m.n_max())?.to_f64();
    let start = (1..=m.n_max())
        .map(|j| (r0.coeff(j) - rho.series[0].coeff(j)).abs())
        .fold(0.0, f64::max);
    let mut checks = vec![
        Check::at_most("moment inversion round trip", round_trip, 1e-10),
        Check::at_most("inverted rho at t = 0 equals the closed form", start, 1e-10),
    ];
    let mut residuals = Vec::new();
    for &t in times {
        let r = pde0_at(m, k, t)?;
        checks.push(Check::at_most(format!("rho equation residual at t = {t}"), r.max, pde_tol));
        residuals.push((format!("pde0_t{t}"), r));
    }
    Ok((checks, residuals))
}

fn mgf_check(p: &MgfParams, tol: Option<f64>, dir: &Path) -> Result<Outcome> {
    let m = integrate_moments(&JacobiParams::for_k(p.k, p.n_max), p.t_end, p.dt)?;
    let z: Vec<Complex64> = p.z.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
    let gap = mgf_relation_check(&m, p.k, &z)?;
    let mut checks = vec![Check::at_most(
        "generating function equals stationary part plus transferred rho",
        gap,
        tol.unwrap_or(1e-8),
    )];
    let (more, mut residuals) = rho_checks(&m, p.k, &p.residual_times, 1e-5)?;
    checks.extend(more);
    let mid = m.t_grid.len() / 2;
    let r1 = pde1_residual(&m, p.k, mid.saturating_sub(5)..(mid + 6).min(m.t_grid.len()))?;
    checks.push(Check::at_most("moment generating function equation residual", r1.max, 1e-5));
    residuals.push(("pde1".into(), r1));
    let mut out = Outcome { checks, ..Outcome::default() };
    out.write(dir, "residuals.csv", emit_plot_data(&PlotInput::Residual(&residuals))?)?;
    Ok(out)
}

fn characteristic_checks(k: u32, z0: Complex64, t_end: f64, m: &MomentVector, tol: f64) -> Result<(Vec<Check>, crate::generating_functions::CharacteristicState)> {
    let st = characteristic_trace(k, z0, t_end, m)?;
    let label = format!("k = {k}, z0 = {z0}");
    let mut checks = vec![Check::at_most(format!("conserved quantity drift ({label})"), st.max_drift, tol)];
    if st.branch_crossed {
        checks[0].detail = format!("branch crossed; traced to t = {}", st.t_grid.last().unwrap_or(&0.0));
    }
    if k == 2 {
        let gap = st
            .t_grid
            .iter()
            .zip(&st.z_path)
            .map(|(&t, z)| (k2_curve(z0, t) - z).norm())
            .fold(0.0, f64::max);
        checks.push(Check::at_most(format!("explicit k = 2 curve ({label})"), gap, 1e-8));
    }
    Ok((checks, st))
}

fn characteristics(p: &CharacteristicParams, tol: Option<f64>, dir: &Path) -> Result<Outcome> {
    let m = integrate_moments(&JacobiParams::for_k(p.k, p.n_max), p.t_end, p.dt)?;
    let z0 = Complex64::new(p.z0[0], p.z0[1]);
    let (checks, st) = characteristic_checks(p.k, z0, p.t_end, &m, tol.unwrap_or(1e-6))?;
    let mut out = Outcome { checks, ..Outcome::default() };
    out.write(dir, "characteristic.csv", emit_plot_data(&PlotInput::Characteristic(&st))?)?;
    Ok(out)
}

/// ODE moments of the corner process for diagonal projections of ranks `p`, `q` in `N`.
fn corner_ode(n: usize, p: usize, q: usize, n_max: usize, t_end: f64, dt: f64) -> Result<MomentVector> {
    let (nf, pf, qf) = (n as f64, p as f64, q as f64);
    let r0 = p.min(q) as f64 / pf;
    let mut init = vec![r0; n_max + 1];
    init[0] = 1.0;
    let jp = JacobiParams { k: None, lambda: pf / qf, theta: qf / nf, n_max, init };
    integrate_moments(&jp, t_end, dt)
}

fn z_check(name: String, est: &crate::matrix_sim::Estimate, target: f64, sigmas: f64) -> Check {
    Check::at_most(name, est.z_score(target), sigmas)
        .with_detail(format!("mean {} se {} target {target}", est.mean, est.se))
}

/// Compare every snapshot with its deterministic counterpart.
fn mc_checks(cfg: &SimConfig, res: &SimResult, sigmas: f64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    if let Some(d) = res.density {
        checks.push(Check::at_most("density matrix trace error", d.max_trace_error, 1e-10));
        checks.push(Check::at_most("density matrix negative eigenvalue", (-d.min_eigenvalue).max(0.0), 1e-10));
    }
    checks.push(Check::at_most(
        "unitarity defect before re-projection",
        res.max_unitarity_defect,
        crate::matrix_sim::UNITARITY_TOL,
    ));
    if cfg.keep_spectra {
        let worst = res
            .spectra
            .iter()
            .filter(|s| s.kind == SpectrumKind::WNormalized)
            .flat_map(|s| s.eigenvalues.iter())
            .fold(0.0f64, |acc, &x| acc.max(-x - 1e-10).max(x - 1.0 - 1e-6));
        checks.push(Check::at_most("W/k^2 eigenvalues inside [0, 1]", worst.max(0.0), 0.0));
    }
    let kf = cfg.k as f64;
    let ode_w = if cfg.observables.w_moments {
        Some(integrate_normalized(kf, cfg.n_max, cfg.t_end, cfg.dt)?)
    } else {
        None
    };
    let ranks = if cfg.observables.compressed_jacobi || cfg.observables.complement {
        Some((cfg.p_rank()?, cfg.q_rank()?))
    } else {
        None
    };
    let corner = match ranks {
        Some((p, q)) if cfg.observables.compressed_jacobi => Some(corner_ode(cfg.n, p, q, cfg.n_max, cfg.t_end, cfg.dt)?),
        _ => None,
    };
    let complement = match ranks {
        Some((p, q)) if cfg.observables.complement => {
            Some(corner_ode(cfg.n, cfg.n - p, cfg.n - q, cfg.n_max, cfg.t_end, cfg.dt)?)
        }
        _ => None,
    };
    let grid = crate::moment_dynamics::uniform_grid(cfg.t_end, cfg.dt)?;
    let at = |t: f64| grid.iter().position(|g| (g - t).abs() < 1e-9 * t.max(1.0)).unwrap_or_else(|| {
        ((t / cfg.t_end) * (grid.len() - 1) as f64).round() as usize
    });
    for snap in &res.snapshots {
        let SimSnapshot { t, .. } = *snap;
        checks.push(z_check(format!("tr(U)/N at t = {t}"), &snap.trace_u, (-t / 2.0).exp(), sigmas));
        if let Some(e) = &snap.trace_w {
            checks.push(z_check(format!("tr(W)/N at t = {t}"), e, kf * (1.0 + (kf - 1.0) * (-t).exp()), sigmas));
        }
        let i = at(t);
        if let Some(r) = &ode_w {
            for (n, e) in snap.w_moments.iter().enumerate().take(3) {
                checks.push(z_check(format!("r_{} at t = {t}", n + 1), e, r[i][n + 1], sigmas));
            }
        }
        if let Some(m) = &corner {
            for (n, e) in snap.compressed_moments.iter().enumerate().take(3) {
                checks.push(z_check(format!("compressed m_{} at t = {t}", n + 1), e, m.values[i][n + 1], sigmas));
            }
        }
        if let Some(m) = &complement {
            for (n, e) in snap.complement_moments.iter().enumerate().take(3) {
                checks.push(z_check(format!("complement m_{} at t = {t}", n + 1), e, m.values[i][n + 1], sigmas));
            }
        }
    }
    Ok(checks)
}

fn simulate_cmd(p: &SimulateParams, seed: u64, tol: Option<f64>, dir: &Path) -> Result<Outcome> {
    let cfg = p.to_sim_config(seed);
    let res = simulate(&cfg)?;
    let mut out = Outcome {
        checks: mc_checks(&cfg, &res, tol.unwrap_or(p.sigmas))?,
        ..Outcome::default()
    };
    let mut summary = res.clone();
    summary.spectra.clear();
    out.write(dir, "summary.json", serde_json::to_string_pretty(&summary)?)?;
    out.write(dir, "mc_moments.csv", res.moments_csv())?;
    if cfg.keep_spectra {
        out.write(dir, "spectra.csv", res.spectra_csv())?;
        let pooled = res.pooled(SpectrumKind::WNormalized, res.snapshots.len() - 1);
        if !pooled.is_empty() {
            let csv = emit_plot_data(&PlotInput::Histogram { eigenvalues: &pooled, k: cfg.k, bins: p.bins })?;
            out.write(dir, "histogram.csv", csv)?;
        }
    }
    if cfg.observables.w_moments {
        let ode = integrate_w_moments(cfg.k, cfg.n_max, cfg.t_end, cfg.dt)?;
        let csv = emit_plot_data(&PlotInput::MomentVsT { ode: &ode.r, mc: Some(&res) })?;
        out.write(dir, "moment_vs_t.csv", csv)?;
    }
    Ok(out)
}

type Task<'a> = Box<dyn Fn() -> Result<Vec<Check>> + Send + Sync + 'a>;

fn full_verify(p: &FullVerifyParams, seed: u64, tol: Option<f64>, dir: &Path) -> Result<Outcome> {
    if p.k < 2 {
        return Err(Error::InvalidParameter(format!("k = {} must be at least 2", p.k)));
    }
    if p.n_max < 3 {
        return Err(Error::InvalidParameter("full-verify needs n_max >= 3".into()));
    }
    let k = p.k;
    let m = integrate_moments(&JacobiParams::for_k(k, p.n_max), p.t_end, p.dt)?;
    let ode_tol = tol.unwrap_or(1e-9);
    let times: Vec<f64> = [0.5, 1.0, 2.0].into_iter().filter(|&t| t + 3.0 * p.dt <= p.t_end).collect();
    let m_ref = &m;
    let times_ref = &times;

    let tasks: Vec<(&str, Task<'_>)> = vec![
        ("expansion", Box::new(|| {
            let rep = verify_expansion(p.n_max)?;
            Ok(vec![Check::at_most(format!("{} word-algebra identities", rep.checks), rep.failures.len() as f64, 0.0)
                .with_detail(rep.failures.join("; "))])
        })),
        ("stationary", Box::new(|| Ok(stationary_routes(k, p.n_max)?.0))),
        ("ode", Box::new(|| moment_checks(m_ref, ode_tol))),
        ("rho", Box::new(|| Ok(rho_checks(m_ref, k, times_ref, 1e-5)?.0))),
        ("characteristic", Box::new(|| {
            let t_end = p.t_end.min(0.5);
            let mc = integrate_moments(&JacobiParams::for_k(k, CHARACTERISTIC_ORDER), t_end, p.dt)?;
            let mut out = Vec::new();
            for z0 in [Complex64::new(0.05, 0.0), Complex64::new(0.0, 0.1)] {
                out.extend(characteristic_checks(k, z0, t_end, &mc, 1e-6)?.0);
            }
            Ok(out)
        })),
        ("complement", Box::new(|| {
            let mut jp = JacobiParams::for_k(k, p.n_max.min(6));
            jp.theta = (k as f64 - 1.0) / k as f64;
            jp.k = None;
            let direct = integrate_moments(&jp, p.t_end, p.dt)?;
            let base = integrate_moments(&JacobiParams::for_k(k, p.n_max.min(6)), p.t_end, p.dt)?;
            let mapped = complement_moments(&base)?;
            let gap = direct.values.iter().zip(&mapped.values)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
                .fold(0.0, f64::max);
            Ok(vec![Check::at_most("complement identity", gap, 1e-8)])
        })),
        ("cumulants", Box::new(|| Ok(cumulant_checks(&rational(1, k.into()), p.n_max)?.0))),
        ("marchenko-pastur", Box::new(|| {
            let rows = mp_limit_check(p.n_max, k)?;
            let bad: Vec<usize> = rows.iter().filter(|r| !r.identity_holds).map(|r| r.n).collect();
            Ok(vec![Check::exact("4^n (1/2)_n / (n+1)! = C_n", bad.is_empty(), format!("{bad:?}"))])
        })),
        ("monte-carlo", Box::new(|| {
            if p.mc_n == 0 {
                return Ok(Vec::new());
            }
            let mut cfg = SimConfig::new(p.mc_n, k, p.t_end.min(1.0), p.mc_dt, p.mc_trajectories, seed);
            cfg.n_max = 3;
            let res = simulate(&cfg)?;
            mc_checks(&cfg, &res, p.mc_sigmas)
        })),
    ];
    let results: Vec<Vec<Check>> = tasks
        .par_iter()
        .map(|(name, task)| {
            task().unwrap_or_else(|e| vec![Check::exact(*name, false, e.to_string())])
        })
        .collect();
    let mut out = Outcome { checks: results.into_iter().flatten().collect(), ..Outcome::default() };
    out.write(dir, "moment_vs_t.csv", emit_plot_data(&PlotInput::MomentVsT { ode: &m, mc: None })?)?;
    out.write(dir, "full_verify.json", serde_json::to_string_pretty(&out.checks)?)?;
    Ok(out)
}
