use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::generating_functions::{CharacteristicState, PdeResidual};
use crate::matrix_sim::SimResult;
use crate::moment_dynamics::{stationary_cdf, stationary_density, stationary_support, MomentVector};
use crate::{Error, Result};

/// Write `contents` to `dir/name` through a temporary file and a rename, so a
/// reader never sees a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, &target)?;
    Ok(target)
}

/// One named verification with its measured value and bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    /// Passes when `value <= limit`.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= limit,
            value,
            limit,
            detail: String::new(),
        }
    }

    /// Exact check: value 0 on success, 1 on failure.
    pub fn exact(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: ok,
            value: if ok { 0.0 } else { 1.0 },
            limit: 0.0,
            detail: detail.into(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// Which tidy table [`emit_plot_data`] produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    Histogram,
    MomentVsT,
    Residual,
    Characteristic,
}

/// Inputs of the plot tables.
pub enum PlotInput<'a> {
    /// Sorted eigenvalues of `W/k²` with the stationary density overlay.
    Histogram { eigenvalues: &'a [f64], k: u32, bins: usize },
    /// ODE moments with optional Monte Carlo estimates on the same times.
    MomentVsT { ode: &'a MomentVector, mc: Option<&'a SimResult> },
    Residual(&'a [(String, PdeResidual)]),
    Characteristic(&'a CharacteristicState),
}

impl PlotInput<'_> {
    pub fn kind(&self) -> PlotKind {
        match self {
            Self::Histogram { .. } => PlotKind::Histogram,
            Self::MomentVsT { .. } => PlotKind::MomentVsT,
            Self::Residual(_) => PlotKind::Residual,
            Self::Characteristic(_) => PlotKind::Characteristic,
        }
    }
}

fn missing(what: &str) -> Error {
    Error::InvalidParameter(format!("plot data: missing input ({what})"))
}

/// Tidy CSV with a header row for any plotting tool.
pub fn emit_plot_data(input: &PlotInput<'_>) -> Result<String> {
    match input {
        PlotInput::Histogram { eigenvalues, k, bins } => histogram_csv(eigenvalues, *k, *bins),
        PlotInput::MomentVsT { ode, mc } => moment_vs_t_csv(ode, *mc),
        PlotInput::Residual(rows) => {
            if rows.is_empty() {
                return Err(missing("no residuals"));
            }
            let mut out = String::from("series,order,residual\n");
            for (name, r) in rows.iter() {
                for (n, v) in r.per_order.iter().enumerate() {
                    let _ = writeln!(out, "{name},{n},{v:e}");
                }
            }
            Ok(out)
        }
        PlotInput::Characteristic(st) => {
            if st.t_grid.is_empty() {
                return Err(missing("empty characteristic"));
            }
            let mut out = String::from("t,re_z,im_z,re_y,im_y,re_f,im_f,drift\n");
            for i in 0..st.t_grid.len() {
                let (z, y, f) = (st.z_path[i], st.y_path[i], st.f_path[i]);
                let _ = writeln!(
                    out,
                    "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                    st.t_grid[i], z.re, z.im, y.re, y.im, f.re, f.im, st.drift[i]
                );
            }
            Ok(out)
        }
    }
}

/// Histogram on `[0, 4(k-1)/k²]` with columns
/// `bin_left,bin_right,count,empirical_density,stationary_density,stationary_mass`.
pub fn histogram_csv(eigenvalues: &[f64], k: u32, bins: usize) -> Result<String> {
    if eigenvalues.is_empty() {
        return Err(missing("no eigenvalues"));
    }
    if bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    let top = stationary_support(k).max(eigenvalues.iter().copied().fold(0.0, f64::max));
    let width = top / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in eigenvalues {
        let i = ((x / width).floor().max(0.0) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let total = eigenvalues.len() as f64;
    let mut out = String::from(
        "bin_left,bin_right,count,empirical_density,stationary_density,stationary_mass\n",
    );
    for (i, c) in counts.iter().enumerate() {
        let (l, r) = (i as f64 * width, (i + 1) as f64 * width);
        let mid = 0.5 * (l + r);
        let mass = stationary_cdf(k, r) - stationary_cdf(k, l);
        let _ = writeln!(
            out,
            "{l},{r},{c},{},{},{mass}",
            *c as f64 / (total * width),
            stationary_density(k, mid)
        );
    }
    Ok(out)
}

/// Columns `t,order,ode,mc_mean,mc_se`; Monte Carlo cells are empty where no
/// snapshot was taken at that ODE time.
pub fn moment_vs_t_csv(ode: &MomentVector, mc: Option<&SimResult>) -> Result<String> {
    if ode.t_grid.is_empty() {
        return Err(missing("empty moment vector"));
    }
    let mut out = String::from("t,order,ode,mc_mean,mc_se\n");
    for (i, &t) in ode.t_grid.iter().enumerate() {
        let snap = mc.and_then(|r| r.snapshots.iter().find(|s| (s.t - t).abs() < 1e-9));
        for n in 1..=ode.n_max() {
            let est = snap.and_then(|s| {
                let v = if s.w_moments.is_empty() { &s.compressed_moments } else { &s.w_moments };
                v.get(n - 1)
            });
            match est {
                Some(e) => {
                    let _ = writeln!(out, "{t},{n},{},{},{}", ode.values[i][n], e.mean, e.se);
                }
                None => {
                    let _ = writeln!(out, "{t},{n},{},,", ode.values[i][n]);
                }
            }
        }
    }
    Ok(out)
}
