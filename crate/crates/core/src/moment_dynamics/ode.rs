use crate::{Error, Result};

/// Step control for [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    /// Bound on `|y_fine - y_coarse| / max(1, |y_fine|)` per component and grid interval.
    pub tol: f64,
    /// Smallest substep tried before giving up.
    pub min_step: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            min_step: 1e-7,
        }
    }
}

/// Uniform grid `0, h, 2h, ..., t_end` with `h <= dt_hint`.
pub fn uniform_grid(t_end: f64, dt_hint: f64) -> Result<Vec<f64>> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidGrid(format!("t_end = {t_end}")));
    }
    if !(dt_hint > 0.0 && dt_hint.is_finite()) {
        return Err(Error::InvalidGrid(format!("dt = {dt_hint}")));
    }
    let steps = (t_end / dt_hint - 1e-9).ceil().max(0.0) as usize;
    if steps == 0 {
        return Ok(vec![0.0]);
    }
    let h = t_end / steps as f64;
    Ok((0..=steps).map(|i| if i == steps { t_end } else { i as f64 * h }).collect())
}

struct Rk4<'a, F> {
    rhs: &'a F,
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl<'a, F: Fn(&[f64], &mut [f64])> Rk4<'a, F> {
    fn new(rhs: &'a F, dim: usize) -> Self {
        Self {
            rhs,
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    fn step(&mut self, y: &mut [f64], h: f64) {
        let f = self.rhs;
        f(y, &mut self.k1);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + 0.5 * h * self.k1[i];
        }
        f(&self.tmp, &mut self.k2);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + 0.5 * h * self.k2[i];
        }
        f(&self.tmp, &mut self.k3);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + h * self.k3[i];
        }
        f(&self.tmp, &mut self.k4);
        for i in 0..y.len() {
            y[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }

    fn advance(&mut self, y0: &[f64], h: f64, substeps: usize) -> Vec<f64> {
        let mut y = y0.to_vec();
        let sub = h / substeps as f64;
        for _ in 0..substeps {
            self.step(&mut y, sub);
        }
        y
    }
}

/// Classic RK4 on each grid interval, halving the substep until two successive
/// resolutions agree to `opts.tol`, then keeping the Richardson-extrapolated value.
pub fn integrate<F>(rhs: F, y0: &[f64], grid: &[f64], opts: OdeOptions) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64], &mut [f64]),
{
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("times must increase strictly".into()));
    }
    let mut rk = Rk4::new(&rhs, y0.len());
    let mut out = Vec::with_capacity(grid.len());
    out.push(y0.to_vec());
    let mut substeps = 1usize;
    for w in grid.windows(2) {
        let h = w[1] - w[0];
        let prev = out.last().expect("grid has a first point").clone();
        let mut coarse = rk.advance(&prev, h, substeps);
        let next = loop {
            let fine = rk.advance(&prev, h, 2 * substeps);
            let err = coarse
                .iter()
                .zip(&fine)
                .map(|(c, f)| (f - c).abs() / f.abs().max(1.0))
                .fold(0.0, f64::max);
            if err <= opts.tol {
                break coarse
                    .iter()
                    .zip(&fine)
                    .map(|(c, f)| f + (f - c) / 15.0)
                    .collect::<Vec<_>>();
            }
            if !err.is_finite() {
                break fine;
            }
            substeps *= 2;
            let step = h / substeps as f64;
            if step < opts.min_step {
                return Err(Error::ToleranceNotReached { t: w[0], step });
            }
            coarse = fine;
        };
        if let Some(order) = next.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: w[1], order });
        }
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_covers_end_point() {
        let g = uniform_grid(1.0, 0.3).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(uniform_grid(0.0, 0.1).unwrap(), vec![0.0]);
        assert_eq!(uniform_grid(1.0, 0.1).unwrap().len(), 11);
        assert!(uniform_grid(1.0, 0.0).is_err());
    }

    #[test]
    fn exponential_decay_and_oscillator() {
        let grid = uniform_grid(5.0, 0.1).unwrap();
        let ys = integrate(|y: &[f64], d: &mut [f64]| {
            d[0] = -3.0 * y[0];
            d[1] = y[2];
            d[2] = -y[1];
        }, &[1.0, 0.0, 1.0], &grid, OdeOptions::default())
        .unwrap();
        for (t, y) in grid.iter().zip(&ys) {
            assert!((y[0] - (-3.0 * t).exp()).abs() < 1e-12);
            assert!((y[1] - t.sin()).abs() < 1e-11);
        }
    }

    #[test]
    fn blow_up_is_reported() {
        let grid = uniform_grid(2.0, 0.1).unwrap();
        let r = integrate(|y: &[f64], d: &mut [f64]| d[0] = y[0] * y[0], &[1.0], &grid, OdeOptions::default());
        assert!(matches!(r, Err(Error::ToleranceNotReached { .. }) | Err(Error::NonFinite { .. })));
    }
}
