use faer::{c64, Mat, MatRef, Side};

use super::config::MAX_EMPIRICAL_ORDER;
use super::ubm::mul;
use crate::{Error, Result};

/// `GG*` for `G = U_1 + … + U_k`.
pub fn gram_of_sum(unitaries: &[Mat<c64>]) -> Result<Mat<c64>> {
    let first = unitaries
        .first()
        .ok_or_else(|| Error::InvalidParameter("no unitaries supplied".into()))?;
    let n = first.nrows();
    if unitaries.iter().any(|u| u.nrows() != n || u.ncols() != n) {
        return Err(Error::InvalidParameter("unitaries must all be N×N".into()));
    }
    let mut g = Mat::<c64>::zeros(n, n);
    for u in unitaries {
        g += u;
    }
    Ok(mul(g.as_ref(), g.adjoint()))
}

/// The density matrix `GG*/tr(GG*)`.
pub fn build_density_matrix(unitaries: &[Mat<c64>]) -> Result<Mat<c64>> {
    let w = gram_of_sum(unitaries)?;
    let tr = trace(w.as_ref()).re;
    if !(tr > 0.0) {
        return Err(Error::ZeroTrace);
    }
    Ok(Mat::from_fn(w.nrows(), w.ncols(), |i, j| w[(i, j)] / tr))
}

pub fn trace(m: MatRef<'_, c64>) -> c64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: MatRef<'_, c64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut ev = m.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::Eigen)?;
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// `(1/len) Σ λ^n` for `n = 1..=n_max`.
pub fn moments_of_eigenvalues(eigenvalues: &[f64], n_max: usize) -> Vec<f64> {
    let mut sums = vec![0.0; n_max];
    for &l in eigenvalues {
        let mut p = 1.0;
        for s in sums.iter_mut() {
            p *= l;
            *s += p;
        }
    }
    let len = eigenvalues.len().max(1) as f64;
    sums.into_iter().map(|s| s / len).collect()
}

/// Normalized traces `tr(M^n)/N`, `n = 1..=n_max`, of a Hermitian matrix,
/// computed from a single eigendecomposition.
pub fn empirical_moments(m: MatRef<'_, c64>, n_max: usize) -> Result<Vec<f64>> {
    if n_max > MAX_EMPIRICAL_ORDER {
        return Err(Error::SizeGuard {
            what: "empirical moment order",
            limit: MAX_EMPIRICAL_ORDER,
            got: n_max,
        });
    }
    Ok(moments_of_eigenvalues(&hermitian_eigenvalues(m)?, n_max))
}

/// `A A*` for the top-left `p×q` block `A` of `u`: the compression of
/// `P U Q U* P` to the range of `P` for diagonal projections onto the first
/// `p` and `q` coordinates.
pub fn corner_jacobi(u: MatRef<'_, c64>, p: usize, q: usize) -> Mat<c64> {
    let a = u.submatrix(0, 0, p, q);
    mul(a, a.adjoint())
}

/// Same for the complementary projections `1-P`, `1-Q`.
pub fn complement_jacobi(u: MatRef<'_, c64>, p: usize, q: usize) -> Mat<c64> {
    let n = u.nrows();
    let b = u.submatrix(p, q, n - p, u.ncols() - q);
    mul(b, b.adjoint())
}

/// Kolmogorov distance between the empirical law of `sorted` and `cdf`.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_moments() {
        let m = empirical_moments(Mat::<c64>::identity(6, 6).as_ref(), 5).unwrap();
        for v in m {
            assert!((v - 1.0).abs() < 1e-13);
        }
        assert!(empirical_moments(Mat::<c64>::identity(2, 2).as_ref(), 13).is_err());
    }

    #[test]
    fn density_at_time_zero_is_maximally_mixed() {
        let n = 5;
        let us = vec![Mat::<c64>::identity(n, n); 3];
        let d = build_density_matrix(&us).unwrap();
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 / n as f64 } else { 0.0 };
                assert!((d[(i, j)] - c64::new(want, 0.0)).norm() < 1e-15);
            }
        }
        assert!((trace(d.as_ref()).re - 1.0).abs() < 1e-15);
        let zero = vec![Mat::<c64>::identity(n, n), -Mat::<c64>::identity(n, n)];
        assert!(matches!(build_density_matrix(&zero), Err(Error::ZeroTrace)));
    }

    #[test]
    fn corners_of_identity_are_projections() {
        let u = Mat::<c64>::identity(6, 6);
        let j = corner_jacobi(u.as_ref(), 2, 2);
        assert_eq!(empirical_moments(j.as_ref(), 3).unwrap(), vec![1.0; 3]);
        let c = complement_jacobi(u.as_ref(), 2, 2);
        assert_eq!(c.nrows(), 4);
        assert_eq!(empirical_moments(c.as_ref(), 3).unwrap(), vec![1.0; 3]);
        // P ≠ Q: PQP = 0 on the range of P when the ranges are disjoint
        let perm = Mat::<c64>::from_fn(4, 4, |i, j| {
            if (i + 2) % 4 == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) }
        });
        let j = corner_jacobi(perm.as_ref(), 2, 2);
        assert_eq!(empirical_moments(j.as_ref(), 2).unwrap(), vec![0.0; 2]);
    }

    #[test]
    fn ks_distance_of_uniform_grid() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let d = ks_distance(&xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.005).abs() < 1e-12);
    }
}
