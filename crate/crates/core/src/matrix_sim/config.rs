use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ubm::ExpMethod;
use crate::scalar::{parse_rational, rational_to_string, Rational};
use crate::{Error, Result};

/// Largest moment order computed from sampled spectra.
pub const MAX_EMPIRICAL_ORDER: usize = 12;

/// Projection rank as a fraction of `N`, written `"p/q"` in config files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankFraction(pub Rational);

impl RankFraction {
    pub fn new(num: i64, den: i64) -> Self {
        Self(crate::scalar::rational(num, den))
    }

    /// The rank `fraction · n`, which must be a whole number in `1..=n`.
    pub fn resolve(&self, n: usize) -> Result<usize> {
        let scaled = &self.0 * Rational::from_integer(n.into());
        let mismatch = || Error::RankMismatch {
            rank: self.to_string(),
            n,
        };
        if !scaled.is_integer() || !scaled.is_positive() {
            return Err(mismatch());
        }
        let r = scaled.to_integer().to_usize().ok_or_else(mismatch)?;
        if r > n {
            return Err(mismatch());
        }
        Ok(r)
    }

    fn validate(&self) -> Result<()> {
        if self.0 <= Rational::zero() || self.0 > Rational::one() {
            return Err(Error::InvalidParameter(format!(
                "projection rank {self} must lie in (0, 1]"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for RankFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational_to_string(&self.0))
    }
}

impl FromStr for RankFraction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let r = Self(parse_rational(s)?);
        r.validate()?;
        Ok(r)
    }
}

impl Serialize for RankFraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RankFraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which quantities a simulation records.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Observables {
    /// Spectral checks on `GG*/tr(GG*)`.
    pub density_matrix: bool,
    /// Moments of `W/k²` with `W = GG*`, plus `tr(W)/N` and `tr(U)/N`.
    pub w_moments: bool,
    /// Moments of the corner `PUQU*P` normalized by the rank of `P`.
    pub compressed_jacobi: bool,
    /// Moments of the complementary corner `(1-P)U(1-Q)U*(1-P)`.
    pub complement: bool,
}

impl Default for Observables {
    fn default() -> Self {
        Self {
            density_matrix: true,
            w_moments: true,
            compressed_jacobi: false,
            complement: false,
        }
    }
}

/// Parameters of a Monte Carlo run.
///
/// The Hermitian increments have entry covariance `dt/N`, so as `N → ∞` each
/// matrix path converges to the free unitary Brownian motion with no further
/// rescaling of time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n: usize,
    pub k: u32,
    pub t_end: f64,
    pub dt: f64,
    pub trajectories: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub observables: Observables,
    /// Highest moment order recorded.
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Number of equally spaced recording times in `(0, t_end]`.
    #[serde(default = "one")]
    pub snapshots: usize,
    /// Rank fraction of `P`; defaults to `1/k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<RankFraction>,
    /// Rank fraction of `Q`; defaults to `1/k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<RankFraction>,
    #[serde(default)]
    pub method: ExpMethod,
    /// Keep every sampled spectrum in the result (needed for histograms).
    #[serde(default)]
    pub keep_spectra: bool,
}

fn default_n_max() -> usize {
    4
}

fn one() -> usize {
    1
}

impl SimConfig {
    pub fn new(n: usize, k: u32, t_end: f64, dt: f64, trajectories: usize, seed: u64) -> Self {
        Self {
            n,
            k,
            t_end,
            dt,
            trajectories,
            seed,
            observables: Observables::default(),
            n_max: default_n_max(),
            snapshots: 1,
            p: None,
            q: None,
            method: ExpMethod::default(),
            keep_spectra: false,
        }
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Step indices at which snapshots are taken, increasing, the last one being `steps()`.
    pub fn snapshot_steps(&self) -> Vec<usize> {
        let steps = self.steps();
        let s = self.snapshots.max(1);
        let mut out: Vec<usize> = (1..=s).map(|i| (i * steps + s / 2) / s).collect();
        out.dedup();
        out
    }

    pub fn p_rank(&self) -> Result<usize> {
        self.p.clone().unwrap_or_else(|| RankFraction::new(1, self.k.into())).resolve(self.n)
    }

    pub fn q_rank(&self) -> Result<usize> {
        self.q.clone().unwrap_or_else(|| RankFraction::new(1, self.k.into())).resolve(self.n)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.k < 2 {
            return bad(format!("k = {} must be at least 2", self.k));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end = {} must be positive", self.t_end));
        }
        if !(self.dt > 0.0 && self.dt <= self.t_end) {
            return bad(format!("dt = {} must lie in (0, t_end]", self.dt));
        }
        if self.trajectories == 0 {
            return bad("at least one trajectory is required".into());
        }
        if self.n_max == 0 {
            return bad("n_max must be positive".into());
        }
        if self.n_max > MAX_EMPIRICAL_ORDER {
            return Err(Error::SizeGuard {
                what: "empirical moment order",
                limit: MAX_EMPIRICAL_ORDER,
                got: self.n_max,
            });
        }
        if self.snapshots == 0 || self.snapshots > self.steps() {
            return bad(format!(
                "snapshots = {} must lie in 1..={}",
                self.snapshots,
                self.steps()
            ));
        }
        for r in [&self.p, &self.q].into_iter().flatten() {
            r.validate()?;
        }
        let obs = &self.observables;
        if obs.compressed_jacobi || obs.complement {
            let (p, q) = (self.p_rank()?, self.q_rank()?);
            if obs.complement && (p == self.n || q == self.n) {
                return bad("complement needs projections of rank below n".into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_resolve_or_mismatch() {
        assert_eq!(RankFraction::new(1, 3).resolve(201).unwrap(), 67);
        assert!(matches!(
            RankFraction::new(1, 3).resolve(200),
            Err(Error::RankMismatch { .. })
        ));
        assert!("3/2".parse::<RankFraction>().is_err());
        assert_eq!("2/6".parse::<RankFraction>().unwrap().to_string(), "1/3");
    }

    #[test]
    fn snapshot_steps_end_at_final_step() {
        let mut c = SimConfig::new(10, 3, 1.0, 1e-2, 2, 0);
        assert_eq!(c.snapshot_steps(), vec![100]);
        c.snapshots = 4;
        assert_eq!(c.snapshot_steps(), vec![25, 50, 75, 100]);
        c.validate().unwrap();
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        let mut c = SimConfig::new(10, 3, 1.0, 1e-2, 2, 0);
        c.observables.compressed_jacobi = true;
        assert!(matches!(c.validate(), Err(Error::RankMismatch { .. })));
        c.n = 12;
        c.validate().unwrap();
        c.n_max = 13;
        assert!(matches!(c.validate(), Err(Error::SizeGuard { .. })));
        let c = SimConfig::new(10, 1, 1.0, 1e-2, 2, 0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn toml_round_trip_and_unknown_keys() {
        let text = r#"
            n = 30
            k = 3
            t_end = 1.0
            dt = 0.01
            trajectories = 4
            p = "1/3"
            [observables]
            compressed_jacobi = true
        "#;
        let c: SimConfig = toml::from_str(text).unwrap();
        assert_eq!(c.p_rank().unwrap(), 10);
        assert!(c.observables.w_moments && c.observables.compressed_jacobi);
        let back: SimConfig = toml::from_str(&toml::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(toml::from_str::<SimConfig>(&format!("{text}\nbogus = 1")).is_err());
    }
}
