use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::legendre::legendre;
use super::nc::{catalan, for_each_nc};
use crate::scalar::{parse_rational, rational, rational_to_string, Rational, Scalar};
use crate::{Error, Result};

/// Free cumulants `κ_1, κ_2, ...` of a single variable.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantTable {
    /// Trace of the projection the table was built for, if any.
    pub alpha: Option<Rational>,
    pub values: BTreeMap<usize, Rational>,
}

impl CumulantTable {
    pub fn new(values: BTreeMap<usize, Rational>) -> Self {
        Self { alpha: None, values }
    }

    pub fn get(&self, order: usize) -> Result<&Rational> {
        self.values.get(&order).ok_or(Error::MissingCumulant(order))
    }

    pub fn max_order(&self) -> usize {
        self.values.keys().next_back().copied().unwrap_or(0)
    }

    pub fn to_json(&self) -> Result<String> {
        let wire = CumulantWire {
            alpha: self.alpha.as_ref().map(rational_to_string),
            kappa: self
                .values
                .iter()
                .map(|(k, v)| (k.to_string(), rational_to_string(v)))
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&wire)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: CumulantWire = serde_json::from_str(s)?;
        let alpha = wire.alpha.as_deref().map(parse_rational).transpose()?;
        let mut values = BTreeMap::new();
        for (k, v) in wire.kappa {
            let order: usize = k
                .parse()
                .map_err(|_| Error::Parse(format!("cumulant order {k:?}")))?;
            if order == 0 {
                return Err(Error::Parse("cumulant orders start at 1".into()));
            }
            values.insert(order, parse_rational(&v)?);
        }
        Ok(Self { alpha, values })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CumulantWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<String>,
    kappa: BTreeMap<String, String>,
}

/// Free cumulants of a self-adjoint projection of trace `alpha`:
/// `κ_1 = α`, `κ_n = [P_{n-2}(1-2α) - P_n(1-2α)] / (2(2n-1))` for `n >= 2`.
pub fn projection_cumulants(alpha: &Rational, n_max: usize) -> Result<CumulantTable> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    if *alpha <= Rational::zero() || *alpha >= Rational::one() {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    let beta = Rational::one() - rational(2, 1) * alpha.clone();
    let mut values = BTreeMap::new();
    values.insert(1, alpha.clone());
    for n in 2..=n_max {
        let num = legendre(n - 2, &beta) - legendre(n, &beta);
        values.insert(n, num / Rational::from_i64(2 * (2 * n as i64 - 1)));
    }
    Ok(CumulantTable {
        alpha: Some(alpha.clone()),
        values,
    })
}

/// `m_n = Σ_{π ∈ NC(n)} ∏_{V ∈ π} κ_{|V|}` for `n = 0..=n_max` (`m_0 = 1`).
pub fn moments_from_cumulants(table: &CumulantTable, n_max: usize) -> Result<Vec<Rational>> {
    for order in 1..=n_max {
        table.get(order)?;
    }
    let mut moments = vec![Rational::one()];
    for n in 1..=n_max {
        let mut total = Rational::zero();
        for_each_nc(n, |blocks| {
            let mut term = Rational::one();
            for b in blocks {
                term *= &table.values[&b.len()];
            }
            total += term;
        })?;
        moments.push(total);
    }
    Ok(moments)
}

/// Möbius inversion over the non-crossing lattice: solves
/// `m_n = κ_n + Σ_{π ≠ 1_n} κ_π` order by order. `moments[0]` is ignored.
pub fn cumulants_from_moments(moments: &[Rational]) -> Result<CumulantTable> {
    let mut values: BTreeMap<usize, Rational> = BTreeMap::new();
    for n in 1..moments.len() {
        let mut rest = Rational::zero();
        for_each_nc(n, |blocks| {
            if blocks.len() == 1 {
                return;
            }
            let mut term = Rational::one();
            for b in blocks {
                term *= &values[&b.len()];
            }
            rest += term;
        })?;
        values.insert(n, moments[n].clone() - rest);
    }
    Ok(CumulantTable::new(values))
}

/// A letter of the alternating word `U, U*, U, U*, ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    U,
    UStar,
}

/// Largest `n` accepted by [`compressed_jacobi_moment`] (sums over `NC(2n)`).
pub const COMPRESSED_GUARD: usize = 6;

/// `k τ[(P U P U* P)^n]` for a projection of trace `1/k` free from `U`:
/// `Σ_{π ∈ NC(2n)} κ_π[U, U*, ..., U, U*] k^{|π| - 2n}`.
///
/// `star_cumulant` returns the mixed free cumulant of the letters of one
/// block, in their cyclic-word order.
pub fn compressed_jacobi_moment<T, F>(star_cumulant: F, k: u32, n: usize) -> Result<T>
where
    T: Scalar,
    F: Fn(&[Letter]) -> T,
{
    if n > COMPRESSED_GUARD {
        return Err(Error::SizeGuard {
            what: "compressed Jacobi moment",
            limit: COMPRESSED_GUARD,
            got: n,
        });
    }
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k = {k} must be at least 2")));
    }
    if n == 0 {
        return Ok(T::one());
    }
    let kk = T::from_i64(k as i64);
    let mut total = T::zero();
    let mut letters = Vec::with_capacity(2 * n);
    for_each_nc(2 * n, |blocks| {
        let mut term = T::one();
        for b in blocks {
            letters.clear();
            letters.extend(b.iter().map(|&i| if i % 2 == 0 { Letter::U } else { Letter::UStar }));
            term = term * star_cumulant(&letters);
            if term == T::zero() {
                return;
            }
        }
        let deficit = (2 * n - blocks.len()) as u32;
        total = total.clone() + term / kk.ipow(deficit);
    })?;
    Ok(total)
}

/// Free cumulants of a Haar unitary: only alternating words of even length
/// `2m` survive, with value `(-1)^{m-1} C_{m-1}`.
pub fn haar_unitary_cumulant(letters: &[Letter]) -> Rational {
    let len = letters.len();
    if len == 0 || len % 2 == 1 || letters.windows(2).any(|w| w[0] == w[1]) {
        return Rational::zero();
    }
    let m = (len / 2) as u64;
    let c = Rational::from_integer(catalan(m - 1));
    if m % 2 == 1 {
        c
    } else {
        -c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(entries: &[(usize, Rational)]) -> CumulantTable {
        CumulantTable::new(entries.iter().cloned().collect())
    }

    #[test]
    fn projection_low_orders() {
        let alpha = rational(2, 7);
        let t = projection_cumulants(&alpha, 2).unwrap();
        assert_eq!(t.values[&1], alpha);
        assert_eq!(t.values[&2], alpha.clone() * (Rational::one() - alpha.clone()));
        assert_eq!(t.alpha, Some(alpha));
    }

    #[test]
    fn projection_half_closed_form() {
        let t = projection_cumulants(&rational(1, 2), 16).unwrap();
        for j in 1..=8u64 {
            let sign = if j % 2 == 1 { 1 } else { -1 };
            let expected = rational(sign, 1) * Rational::from_integer(catalan(j - 1))
                / Rational::from_i64(4i64.pow(j as u32));
            assert_eq!(t.values[&(2 * j as usize)], expected, "order {}", 2 * j);
        }
        for n in (3..=15).step_by(2) {
            assert!(t.values[&n].is_zero(), "odd order {n}");
        }
    }

    #[test]
    fn projection_moments_are_constant() {
        for alpha in [rational(1, 2), rational(1, 3), rational(2, 5)] {
            let t = projection_cumulants(&alpha, 8).unwrap();
            let m = moments_from_cumulants(&t, 8).unwrap();
            assert_eq!(m[0], Rational::one());
            for n in 1..=8 {
                assert_eq!(m[n], alpha, "alpha = {alpha}, n = {n}");
            }
        }
    }

    #[test]
    fn point_mass_and_semicircle() {
        let c = rational(3, 5);
        let mut point = vec![(1, c.clone())];
        point.extend((2..=6).map(|n| (n, Rational::zero())));
        let m = moments_from_cumulants(&table(&point), 6).unwrap();
        for n in 0..=6 {
            assert_eq!(m[n], c.ipow(n as u32));
        }

        let mut semi = vec![(1, Rational::zero()), (2, Rational::one())];
        semi.extend((3..=10).map(|n| (n, Rational::zero())));
        let m = moments_from_cumulants(&table(&semi), 10).unwrap();
        for n in 0..=5u64 {
            assert_eq!(m[2 * n as usize], Rational::from_integer(catalan(n)));
            if n < 5 {
                assert!(m[2 * n as usize + 1].is_zero());
            }
        }
    }

    #[test]
    fn missing_order_is_reported() {
        let t = table(&[(1, Rational::one())]);
        assert!(matches!(moments_from_cumulants(&t, 2), Err(Error::MissingCumulant(2))));
    }

    #[test]
    fn invalid_alpha() {
        assert!(projection_cumulants(&rational(0, 1), 3).is_err());
        assert!(projection_cumulants(&rational(1, 1), 3).is_err());
        assert!(projection_cumulants(&rational(1, 2), 0).is_err());
    }

    #[test]
    fn json_round_trip_and_format() {
        let t = projection_cumulants(&rational(1, 3), 4).unwrap();
        let s = t.to_json().unwrap();
        assert!(s.contains("\"alpha\": \"1/3\""));
        assert!(s.contains("\"1\": \"1/3\""));
        assert!(s.contains("\"2\": \"2/9\""));
        assert_eq!(CumulantTable::from_json(&s).unwrap(), t);
        assert!(CumulantTable::from_json(r#"{"kappa": {"0": "1/2"}}"#).is_err());
        assert!(CumulantTable::from_json(r#"{"kappa": {}, "beta": "1"}"#).is_err());
    }

    #[test]
    fn compressed_moment_haar_first_order() {
        for k in 2..=6 {
            let m1: Rational = compressed_jacobi_moment(haar_unitary_cumulant, k, 1).unwrap();
            assert_eq!(m1, rational(1, k as i64));
        }
    }

    #[test]
    fn compressed_moment_trivial_and_constant_oracles() {
        let identity = |l: &[Letter]| if l.len() == 1 { Rational::one() } else { Rational::zero() };
        for n in 0..=4 {
            let v: Rational = compressed_jacobi_moment(identity, 3, n).unwrap();
            assert_eq!(v, Rational::one());
        }
        // Only κ_1 survives: every k sees c^{2n} from the all-singleton partition.
        let c = (-0.35f64).exp();
        let first_only = |l: &[Letter]| if l.len() == 1 { c } else { 0.0 };
        for k in [2, 10, 1000] {
            let v: f64 = compressed_jacobi_moment(first_only, k, 3).unwrap();
            assert!((v - c.powi(6)).abs() < 1e-15);
        }
        assert!(compressed_jacobi_moment(haar_unitary_cumulant, 3, 7).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn moment_cumulant_round_trip(entries in proptest::collection::vec((-9i64..=9, 1i64..=6), 10)) {
            let values: BTreeMap<usize, Rational> = entries
                .iter()
                .enumerate()
                .map(|(i, &(p, q))| (i + 1, rational(p, q)))
                .collect();
            let t = CumulantTable::new(values);
            let m = moments_from_cumulants(&t, 10).unwrap();
            let back = cumulants_from_moments(&m).unwrap();
            prop_assert_eq!(back.values, t.values);
        }
    }
}
