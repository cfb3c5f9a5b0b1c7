use std::collections::BTreeSet;
use std::fmt::Write as _;

use faer::{c64, Mat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{RankFraction, SimConfig};
use super::observables::{
    complement_jacobi, corner_jacobi, gram_of_sum, hermitian_eigenvalues, moments_of_eigenvalues,
    trace,
};
use super::ubm::UbmStepper;
use crate::{Error, Result};

/// Monte Carlo mean with its standard error `sd/√samples` (zero for a single sample).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self { mean: f64::NAN, se: f64::NAN, samples: 0 };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let se = if n > 1 {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, se, samples: n }
    }

    /// `|mean - target| / se`.
    pub fn z_score(&self, target: f64) -> f64 {
        let gap = (self.mean - target).abs();
        if gap == 0.0 {
            0.0
        } else {
            gap / self.se
        }
    }

    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        self.z_score(target) <= sigmas
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    /// `W/k²`.
    WNormalized,
    /// `GG*/tr(GG*)`.
    Density,
    /// `PUQU*P` on the range of `P`.
    Compressed,
    /// `(1-P)U(1-Q)U*(1-P)` on the range of `1-P`.
    Complement,
}

impl SpectrumKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::WNormalized => "w_normalized",
            Self::Density => "density",
            Self::Compressed => "compressed",
            Self::Complement => "complement",
        }
    }
}

/// Sorted eigenvalues of one sampled matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub kind: SpectrumKind,
    pub eigenvalues: Vec<f64>,
    pub n: usize,
    pub k: u32,
    pub t: f64,
    pub trajectory: usize,
    pub seed: u64,
}

/// Estimates at one recording time. Moment vectors hold orders `1..=n_max`
/// and are empty when the observable was not requested.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimSnapshot {
    pub t: f64,
    /// `Re tr(U)/N`, averaged over the simulated unitaries.
    pub trace_u: Estimate,
    /// `tr(W)/N`.
    pub trace_w: Option<Estimate>,
    pub w_moments: Vec<Estimate>,
    pub compressed_moments: Vec<Estimate>,
    pub complement_moments: Vec<Estimate>,
}

/// Worst-case spectral checks on the density matrices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityCheck {
    pub max_trace_error: f64,
    pub min_eigenvalue: f64,
}

impl DensityCheck {
    pub const TOLERANCE: f64 = 1e-10;

    pub fn passed(&self) -> bool {
        self.max_trace_error <= Self::TOLERANCE && self.min_eigenvalue >= -Self::TOLERANCE
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimResult {
    pub config: SimConfig,
    pub snapshots: Vec<SimSnapshot>,
    pub density: Option<DensityCheck>,
    /// Largest `|U*U - I|_max` seen before any re-projection.
    pub max_unitarity_defect: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub spectra: Vec<SpectralSample>,
}

impl SimResult {
    pub fn last(&self) -> &SimSnapshot {
        self.snapshots.last().expect("a run records at least one snapshot")
    }

    /// All eigenvalues of `kind` recorded at snapshot `index`, pooled over trajectories and sorted.
    pub fn pooled(&self, kind: SpectrumKind, index: usize) -> Vec<f64> {
        let Some(t) = self.snapshots.get(index).map(|s| s.t) else {
            return Vec::new();
        };
        let mut out: Vec<f64> = self
            .spectra
            .iter()
            .filter(|s| s.kind == kind && s.t == t)
            .flat_map(|s| s.eigenvalues.iter().copied())
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    /// Tidy table `t,observable,order,mean,se,samples`.
    pub fn moments_csv(&self) -> String {
        let mut out = String::from("t,observable,order,mean,se,samples\n");
        let mut row = |t: f64, name: &str, order: usize, e: &Estimate| {
            let _ = writeln!(out, "{t},{name},{order},{},{},{}", e.mean, e.se, e.samples);
        };
        for s in &self.snapshots {
            row(s.t, "trace_u", 1, &s.trace_u);
            if let Some(e) = &s.trace_w {
                row(s.t, "trace_w", 1, e);
            }
            for (name, v) in [
                ("w_normalized", &s.w_moments),
                ("compressed", &s.compressed_moments),
                ("complement", &s.complement_moments),
            ] {
                for (i, e) in v.iter().enumerate() {
                    row(s.t, name, i + 1, e);
                }
            }
        }
        out
    }

    /// One row per eigenvalue: `kind,trajectory,t,n,k,seed,eigenvalue`.
    pub fn spectra_csv(&self) -> String {
        let mut out = String::from("kind,trajectory,t,n,k,seed,eigenvalue\n");
        for s in &self.spectra {
            for l in &s.eigenvalues {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{l}",
                    s.kind.as_str(),
                    s.trajectory,
                    s.t,
                    s.n,
                    s.k,
                    s.seed
                );
            }
        }
        out
    }
}

#[derive(Default)]
struct TrajPoint {
    trace_u: f64,
    trace_w: Option<f64>,
    w: Vec<f64>,
    compressed: Vec<f64>,
    complement: Vec<f64>,
    density: Option<DensityCheck>,
}

struct TrajRecord {
    points: Vec<TrajPoint>,
    spectra: Vec<SpectralSample>,
    max_defect: f64,
}

/// Independent RNG for trajectory `id`: the master seed selects the key and the
/// id selects the stream, so results do not depend on scheduling.
pub fn trajectory_rng(seed: u64, id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}

fn run_trajectory(cfg: &SimConfig, id: usize, ranks: Option<(usize, usize)>) -> Result<TrajRecord> {
    let obs = &cfg.observables;
    let needs_sum = obs.density_matrix || obs.w_moments;
    let count = if needs_sum { cfg.k as usize } else { 1 };
    let mut rng = trajectory_rng(cfg.seed, id);
    let mut steppers = (0..count)
        .map(|_| UbmStepper::new(cfg.n, cfg.dt, cfg.method))
        .collect::<Result<Vec<_>>>()?;
    let marks: BTreeSet<usize> = cfg.snapshot_steps().into_iter().collect();
    let last = cfg.steps();
    let mut rec = TrajRecord {
        points: Vec::with_capacity(marks.len()),
        spectra: Vec::new(),
        max_defect: 0.0,
    };
    let n = cfg.n as f64;
    let k2 = f64::from(cfg.k * cfg.k);

    for s in 1..=last {
        for st in steppers.iter_mut() {
            st.step(&mut rng)?;
        }
        if !marks.contains(&s) {
            continue;
        }
        let t = s as f64 * cfg.dt;
        let sample = |kind, eigenvalues| SpectralSample {
            kind,
            eigenvalues,
            n: cfg.n,
            k: cfg.k,
            t,
            trajectory: id,
            seed: cfg.seed,
        };
        let mut pt = TrajPoint {
            trace_u: steppers.iter().map(|st| st.normalized_trace().re).sum::<f64>() / count as f64,
            ..TrajPoint::default()
        };

        if needs_sum {
            let us: Vec<Mat<c64>> = steppers.iter().map(|st| st.u.clone()).collect();
            let w = gram_of_sum(&us)?;
            let tr = trace(w.as_ref()).re;
            if !(tr > 0.0) {
                return Err(Error::ZeroTrace);
            }
            let ev = hermitian_eigenvalues(w.as_ref())?;
            pt.trace_w = Some(tr / n);
            if obs.w_moments {
                let scaled: Vec<f64> = ev.iter().map(|l| l / k2).collect();
                pt.w = moments_of_eigenvalues(&scaled, cfg.n_max);
                if cfg.keep_spectra {
                    rec.spectra.push(sample(SpectrumKind::WNormalized, scaled));
                }
            }
            if obs.density_matrix {
                let rho: Vec<f64> = ev.iter().map(|l| l / tr).collect();
                pt.density = Some(DensityCheck {
                    max_trace_error: (rho.iter().sum::<f64>() - 1.0).abs(),
                    min_eigenvalue: rho.first().copied().unwrap_or(0.0),
                });
                if cfg.keep_spectra {
                    rec.spectra.push(sample(SpectrumKind::Density, rho));
                }
            }
        }

        if let Some((p, q)) = ranks {
            let u = steppers[0].u.as_ref();
            if obs.compressed_jacobi {
                let ev = hermitian_eigenvalues(corner_jacobi(u, p, q).as_ref())?;
                pt.compressed = moments_of_eigenvalues(&ev, cfg.n_max);
                if cfg.keep_spectra {
                    rec.spectra.push(sample(SpectrumKind::Compressed, ev));
                }
            }
            if obs.complement {
                let ev = hermitian_eigenvalues(complement_jacobi(u, p, q).as_ref())?;
                pt.complement = moments_of_eigenvalues(&ev, cfg.n_max);
                if cfg.keep_spectra {
                    rec.spectra.push(sample(SpectrumKind::Complement, ev));
                }
            }
        }
        rec.points.push(pt);
    }
    rec.max_defect = steppers.iter().map(|st| st.max_defect).fold(0.0, f64::max);
    Ok(rec)
}

fn column(records: &[TrajRecord], i: usize, pick: impl Fn(&TrajPoint) -> &[f64]) -> Vec<Estimate> {
    let orders = pick(&records[0].points[i]).len();
    (0..orders)
        .map(|o| {
            let xs: Vec<f64> = records.iter().map(|r| pick(&r.points[i])[o]).collect();
            Estimate::from_samples(&xs)
        })
        .collect()
}

/// Run every trajectory (in parallel on the current rayon pool) and reduce in
/// trajectory order.
pub fn simulate(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let obs = &cfg.observables;
    if !(obs.density_matrix || obs.w_moments || obs.compressed_jacobi || obs.complement) {
        return Err(Error::InvalidParameter("no observable selected".into()));
    }
    let ranks = if obs.compressed_jacobi || obs.complement {
        Some((cfg.p_rank()?, cfg.q_rank()?))
    } else {
        None
    };
    let records = (0..cfg.trajectories)
        .into_par_iter()
        .map(|id| run_trajectory(cfg, id, ranks))
        .collect::<Result<Vec<_>>>()?;

    let times: Vec<f64> = cfg.snapshot_steps().iter().map(|&s| s as f64 * cfg.dt).collect();
    let snapshots = times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let trace_u: Vec<f64> = records.iter().map(|r| r.points[i].trace_u).collect();
            let trace_w: Option<Vec<f64>> = records.iter().map(|r| r.points[i].trace_w).collect();
            SimSnapshot {
                t,
                trace_u: Estimate::from_samples(&trace_u),
                trace_w: trace_w.map(|v| Estimate::from_samples(&v)),
                w_moments: column(&records, i, |p| &p.w),
                compressed_moments: column(&records, i, |p| &p.compressed),
                complement_moments: column(&records, i, |p| &p.complement),
            }
        })
        .collect();

    let density = obs.density_matrix.then(|| {
        records
            .iter()
            .flat_map(|r| r.points.iter().filter_map(|p| p.density))
            .fold(
                DensityCheck { max_trace_error: 0.0, min_eigenvalue: f64::INFINITY },
                |acc, d| DensityCheck {
                    max_trace_error: acc.max_trace_error.max(d.max_trace_error),
                    min_eigenvalue: acc.min_eigenvalue.min(d.min_eigenvalue),
                },
            )
    });
    let max_unitarity_defect = records.iter().map(|r| r.max_defect).fold(0.0, f64::max);
    let spectra = records.into_iter().flat_map(|r| r.spectra).collect();
    Ok(SimResult {
        config: cfg.clone(),
        snapshots,
        density,
        max_unitarity_defect,
        spectra,
    })
}

/// Sum of `k` unitary Brownian motions: moments of `W/k²` and density-matrix checks.
pub fn simulate_w(cfg: &SimConfig) -> Result<SimResult> {
    let mut cfg = cfg.clone();
    cfg.observables.w_moments = true;
    cfg.observables.density_matrix = true;
    simulate(&cfg)
}

/// Corner `PU_tQU_t*P` of a single unitary Brownian motion for diagonal
/// projections of the given rank fractions; spectra are kept.
pub fn simulate_compressed_jacobi(
    cfg: &SimConfig,
    p: RankFraction,
    q: RankFraction,
) -> Result<SimResult> {
    let mut cfg = cfg.clone();
    cfg.p = Some(p);
    cfg.q = Some(q);
    cfg.observables.compressed_jacobi = true;
    cfg.observables.w_moments = false;
    cfg.observables.density_matrix = false;
    cfg.keep_spectra = true;
    simulate(&cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_statistics() {
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert!((e.se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(e.within(2.5 + 2.0 * e.se, 3.0));
        assert!(!e.within(2.5 + 4.0 * e.se, 3.0));
        assert_eq!(Estimate::from_samples(&[7.0]).se, 0.0);
    }

    #[test]
    fn reproducible_and_schedule_independent() {
        let mut cfg = SimConfig::new(12, 3, 0.2, 0.02, 3, 99);
        cfg.keep_spectra = true;
        cfg.observables.compressed_jacobi = true;
        cfg.observables.complement = true;
        let a = simulate(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| simulate(&cfg)).unwrap();
        assert_eq!(a.spectra, b.spectra);
        assert_eq!(a.snapshots, b.snapshots);
        cfg.seed = 100;
        assert_ne!(simulate(&cfg).unwrap().spectra, a.spectra);
    }

    #[test]
    fn compressed_projection_equal_ranks_at_small_time() {
        let cfg = SimConfig::new(9, 3, 0.01, 0.01, 2, 1);
        let r = simulate_compressed_jacobi(&cfg, RankFraction::new(1, 3), RankFraction::new(1, 3))
            .unwrap();
        let s = r.last();
        // J_0 = P; after one tiny step the moments are still close to 1
        for e in &s.compressed_moments {
            assert!((e.mean - 1.0).abs() < 0.1, "{e:?}");
        }
        assert_eq!(r.pooled(SpectrumKind::Compressed, 0).len(), 2 * 3);
        assert!(r.spectra_csv().lines().count() == 7);
    }

    #[test]
    fn density_checks_hold() {
        let mut cfg = SimConfig::new(16, 2, 0.5, 0.05, 2, 5);
        cfg.snapshots = 2;
        let r = simulate_w(&cfg).unwrap();
        assert_eq!(r.snapshots.len(), 2);
        assert!(r.density.unwrap().passed(), "{:?}", r.density);
        assert!(r.moments_csv().starts_with("t,observable"));
        let none = SimConfig {
            observables: super::super::config::Observables {
                density_matrix: false,
                w_moments: false,
                compressed_jacobi: false,
                complement: false,
            },
            ..cfg
        };
        assert!(simulate(&none).is_err());
    }
}
