use faer::linalg::matmul::matmul;
use faer::traits::Conjugate;
use faer::{c64, Accum, Mat, MatRef, Par};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How `exp(i √dt G)` is formed at each step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpMethod {
    /// Degree-6 Taylor polynomial with scaling and squaring (four products per step).
    #[default]
    Taylor,
    /// Eigendecomposition of the Hermitian generator.
    Spectral,
}

/// Steps between polar re-projections onto the unitary group.
pub const REPROJECT_EVERY: usize = 100;

/// Largest `|U*U - I|_max` accepted after re-projection.
pub const UNITARITY_TOL: f64 = 1e-8;

/// Taylor argument norm above which the step is scaled and squared.
const TAYLOR_THETA: f64 = 0.075;

/// Hermitian Gaussian matrix with `E|G_ij|² = 1/N`: complex entries above the
/// diagonal (real and imaginary parts of variance `1/(2N)`), real diagonal of variance `1/N`.
pub fn sample_gue<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat<c64> {
    let off = (0.5 / n as f64).sqrt();
    let diag = (1.0 / n as f64).sqrt();
    let mut g = Mat::<c64>::zeros(n, n);
    for j in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        g[(j, j)] = c64::new(diag * d, 0.0);
        for i in 0..j {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let v = c64::new(off * re, off * im);
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    g
}

pub(crate) fn mul<L, R>(a: MatRef<'_, L>, b: MatRef<'_, R>) -> Mat<c64>
where
    L: Conjugate<Canonical = c64>,
    R: Conjugate<Canonical = c64>,
{
    let mut out = Mat::<c64>::zeros(a.nrows(), b.ncols());
    matmul(out.as_mut(), Accum::Replace, a, b, c64::new(1.0, 0.0), Par::Seq);
    out
}

/// Spectral norm estimate of a Hermitian matrix by power iteration, inflated by 10%.
fn norm_estimate(g: &Mat<c64>) -> f64 {
    let n = g.nrows();
    let mut v: Vec<c64> = (0..n).map(|i| c64::new(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.1)).collect();
    let mut lambda = 0.0;
    for _ in 0..12 {
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let mut w = vec![c64::new(0.0, 0.0); n];
        for j in 0..n {
            let vj = v[j] / norm;
            for (i, wi) in w.iter_mut().enumerate() {
                *wi += g[(i, j)] * vj;
            }
        }
        lambda = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v = w;
    }
    1.1 * lambda
}

fn axpy_identity(m: &mut Mat<c64>, c: f64) {
    for i in 0..m.nrows() {
        m[(i, i)] += c64::new(c, 0.0);
    }
}

/// `exp(X)` for a skew-Hermitian `X` with estimated norm `theta`.
fn taylor_exp(x: &Mat<c64>, theta: f64) -> Mat<c64> {
    let squarings = if theta > TAYLOR_THETA {
        (theta / TAYLOR_THETA).log2().ceil() as u32
    } else {
        0
    };
    let s = 0.5f64.powi(squarings as i32);
    let x = Mat::<c64>::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] * s);
    let x2 = mul(x.as_ref(), x.as_ref());
    let x3 = mul(x.as_ref(), x2.as_ref());
    // E = (I + X + X²/2) + X³ (I/6 + X/24 + X²/120 + X³/720)
    let mut b = Mat::<c64>::from_fn(x.nrows(), x.ncols(), |i, j| {
        x[(i, j)] / 24.0 + x2[(i, j)] / 120.0 + x3[(i, j)] / 720.0
    });
    axpy_identity(&mut b, 1.0 / 6.0);
    let mut e = mul(x3.as_ref(), b.as_ref());
    for j in 0..e.ncols() {
        for i in 0..e.nrows() {
            e[(i, j)] += x[(i, j)] + x2[(i, j)] * 0.5;
        }
    }
    axpy_identity(&mut e, 1.0);
    for _ in 0..squarings {
        e = mul(e.as_ref(), e.as_ref());
    }
    e
}

fn spectral_exp(g: &Mat<c64>, scale: f64) -> Result<Mat<c64>> {
    let eig = g.self_adjoint_eigen(faer::Side::Lower).map_err(|_| Error::Eigen)?;
    let v = eig.U();
    let s = eig.S();
    let vd = Mat::<c64>::from_fn(v.nrows(), v.ncols(), |i, j| {
        let phase = scale * s[j].re;
        v[(i, j)] * c64::new(phase.cos(), phase.sin())
    });
    Ok(mul(vd.as_ref(), v.adjoint()))
}

/// `|U*U - I|_max`.
pub fn unitarity_defect(u: &Mat<c64>) -> f64 {
    let p = mul(u.adjoint(), u.as_ref());
    let mut worst = 0.0f64;
    for j in 0..p.ncols() {
        for i in 0..p.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - c64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Two Newton–Schulz steps `U ← U (3I - U*U)/2` towards the unitary polar factor.
fn reproject(u: &Mat<c64>) -> Mat<c64> {
    let mut u = u.clone();
    for _ in 0..2 {
        let mut p = mul(u.adjoint(), u.as_ref());
        for j in 0..p.ncols() {
            for i in 0..p.nrows() {
                p[(i, j)] = -p[(i, j)] * 0.5;
            }
        }
        axpy_identity(&mut p, 1.5);
        u = mul(u.as_ref(), p.as_ref());
    }
    u
}

/// One unitary Brownian motion on `U(N)` advanced by geometric steps
/// `U ← U exp(i √dt G)`. The `-U/2 dt` drift of the SDE is carried by the
/// second-order term of the exponential, so no explicit drift is added.
#[derive(Clone, Debug)]
pub struct UbmStepper {
    pub u: Mat<c64>,
    pub dt: f64,
    pub method: ExpMethod,
    pub steps: usize,
    /// Largest defect seen just before each re-projection.
    pub max_defect: f64,
}

impl UbmStepper {
    pub fn new(n: usize, dt: f64, method: ExpMethod) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("matrix size must be positive".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
        }
        Ok(Self {
            u: Mat::identity(n, n),
            dt,
            method,
            steps: 0,
            max_defect: 0.0,
        })
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let n = self.u.nrows();
        let g = sample_gue(n, rng);
        let sq = self.dt.sqrt();
        let e = match self.method {
            ExpMethod::Taylor => {
                let theta = sq * norm_estimate(&g);
                let x = Mat::<c64>::from_fn(n, n, |i, j| c64::new(0.0, sq) * g[(i, j)]);
                taylor_exp(&x, theta)
            }
            ExpMethod::Spectral => spectral_exp(&g, sq)?,
        };
        self.u = mul(self.u.as_ref(), e.as_ref());
        self.steps += 1;
        if self.steps % REPROJECT_EVERY == 0 {
            self.max_defect = self.max_defect.max(unitarity_defect(&self.u));
            self.u = reproject(&self.u);
            let after = unitarity_defect(&self.u);
            if after > UNITARITY_TOL {
                return Err(Error::Unitarity(after));
            }
        }
        Ok(())
    }

    /// Normalized trace `tr(U)/N`.
    pub fn normalized_trace(&self) -> c64 {
        let n = self.u.nrows();
        (0..n).map(|i| self.u[(i, i)]).sum::<c64>() / n as f64
    }
}

/// Run `steps` steps from the identity and return the unitaries after every
/// `record_every` steps (the identity first).
pub fn evolve_ubm<R: Rng + ?Sized>(
    n: usize,
    dt: f64,
    steps: usize,
    record_every: usize,
    method: ExpMethod,
    rng: &mut R,
) -> Result<Vec<Mat<c64>>> {
    let mut st = UbmStepper::new(n, dt, method)?;
    let every = record_every.max(1);
    let mut path = vec![st.u.clone()];
    for s in 1..=steps {
        st.step(rng)?;
        if s % every == 0 || s == steps {
            path.push(st.u.clone());
        }
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_steps_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let path = evolve_ubm(5, 0.01, 0, 1, ExpMethod::Taylor, &mut rng).unwrap();
        assert_eq!(path.len(), 1);
        assert_eq!(unitarity_defect(&path[0]), 0.0);
        assert_eq!(path[0][(2, 2)], c64::new(1.0, 0.0));
    }

    #[test]
    fn gue_is_hermitian_with_unit_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 120;
        let g = sample_gue(n, &mut rng);
        let mut frob = 0.0;
        for i in 0..n {
            assert_eq!(g[(i, i)].im, 0.0);
            for j in 0..n {
                assert_eq!(g[(i, j)], g[(j, i)].conj());
                frob += g[(i, j)].norm_sqr();
            }
        }
        // E tr(G²)/N = N · (1/N) = 1 per row
        assert!((frob / n as f64 - 1.0).abs() < 0.05, "{}", frob / n as f64);
        let est = norm_estimate(&g);
        assert!(est > 1.8 && est < 2.5, "{est}");
    }

    #[test]
    fn taylor_matches_spectral() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 40;
        let g = sample_gue(n, &mut rng);
        for dt in [1e-3f64, 0.05, 0.5] {
            let sq = dt.sqrt();
            let x = Mat::<c64>::from_fn(n, n, |i, j| c64::new(0.0, sq) * g[(i, j)]);
            let a = taylor_exp(&x, sq * norm_estimate(&g));
            let b = spectral_exp(&g, sq).unwrap();
            let diff = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| (a[(i, j)] - b[(i, j)]).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12, "dt={dt}: {diff}");
            assert!(unitarity_defect(&a) < 1e-12);
        }
    }

    #[test]
    fn reprojection_restores_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = sample_gue(20, &mut rng);
        let mut u = Mat::<c64>::identity(20, 20);
        for j in 0..20 {
            for i in 0..20 {
                u[(i, j)] += g[(i, j)] * 1e-4;
            }
        }
        assert!(unitarity_defect(&u) > 1e-6);
        assert!(unitarity_defect(&reproject(&u)) < 1e-13);
    }

    #[test]
    fn path_stays_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut st = UbmStepper::new(30, 1e-2, ExpMethod::Taylor).unwrap();
        for _ in 0..250 {
            st.step(&mut rng).unwrap();
        }
        assert!(st.max_defect < UNITARITY_TOL);
        assert!(unitarity_defect(&st.u) < UNITARITY_TOL);
        assert!(UbmStepper::new(3, 0.0, ExpMethod::Taylor).is_err());
    }
}
