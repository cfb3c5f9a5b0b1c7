use num_complex::Complex64;
use num_traits::{One, Zero};
use proptest::prelude::*;

use freejacobi::combinatorics::{catalan, cumulants_from_moments, enumerate_nc, legendre, moments_from_cumulants, projection_cumulants};
use freejacobi::generating_functions::{alpha_inv, alpha_map, extract_rho_moments, moments_from_rho, rho0_series};
use freejacobi::moment_dynamics::{
    integrate_moments, stationary_moments_appendix, stationary_moments_catalan, tk_trace, JacobiParams,
};
use freejacobi::scalar::{rational, Rational};
use freejacobi::word_algebra::{jacobi_power, knj_closed_form, knj_from_table};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stationary_routes_agree(k in 2u32..=7, n in 1usize..=12) {
        let a = stationary_moments_catalan(k, n).unwrap();
        let b = stationary_moments_appendix(k, n).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn coefficient_tables_satisfy_relations(n in 1usize..=20) {
        let t = jacobi_power(n).unwrap();
        prop_assert!(t.check_relations().is_ok());
        let ks = knj_from_table(&t);
        for (j, p) in ks.iter().enumerate() {
            prop_assert_eq!(p, &knj_closed_form(n, j).unwrap());
        }
    }

    #[test]
    fn cumulant_moment_round_trip(entries in proptest::collection::vec((-12i64..=12, 1i64..=5), 10)) {
        let mut m = vec![Rational::one()];
        m.extend(entries.iter().map(|&(a, b)| rational(a, b)));
        let table = cumulants_from_moments(&m).unwrap();
        prop_assert_eq!(moments_from_cumulants(&table, 10).unwrap(), m);
    }

    #[test]
    fn projection_first_cumulant_is_trace(num in 1i64..10, extra in 1i64..10) {
        let alpha = rational(num, num + extra);
        let t = projection_cumulants(&alpha, 6).unwrap();
        prop_assert_eq!(t.get(1).unwrap(), &alpha);
    }

    #[test]
    fn moments_stay_in_unit_interval(
        lambda in 0.05f64..=1.0,
        theta in 0.05f64..=1.0,
        start in 0.0f64..=1.0,
    ) {
        // Commuting projections with τ(Q) = θ, τ(P) = λθ, τ(PQ) = start·λθ need
        // τ(P) + τ(Q) - τ(PQ) <= 1.
        prop_assume!(lambda * theta + theta - start * lambda * theta <= 1.0);
        let mut init = vec![start; 7];
        init[0] = 1.0;
        let jp = JacobiParams { k: None, lambda, theta, n_max: 6, init };
        let m = integrate_moments(&jp, 3.0, 0.01).unwrap();
        prop_assert!(!m.flagged());
        for (t, row) in m.t_grid.iter().zip(&m.values) {
            prop_assert_eq!(row[0], 1.0);
            prop_assert!(row.iter().all(|&v| (-1e-9..=1.0 + 1e-9).contains(&v)));
            prop_assert!(row.windows(2).skip(1).all(|w| w[1] <= w[0] + 1e-9));
            let closed = theta + (start - theta) * (-t).exp();
            prop_assert!((row[1] - closed).abs() < 1e-10);
        }
    }

    #[test]
    fn rho_inversion_round_trip(k in 2u32..=5, t in 0.0f64..3.0) {
        let m = integrate_moments(&JacobiParams::for_k(k, 12), t.max(0.02), 0.01).unwrap();
        let rho = extract_rho_moments(&m, k).unwrap();
        let i = m.index_near(t);
        let back = moments_from_rho(&rho.series[i], k).unwrap();
        for (a, b) in back.iter().zip(&m.values[i]) {
            prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
        }
    }

    #[test]
    fn alpha_maps_are_inverse(r in 0.0f64..0.9, phi in -3.0f64..3.0) {
        let z = Complex64::from_polar(r, phi);
        let w = alpha_map(z).unwrap();
        let back = alpha_inv(w).unwrap();
        prop_assert!((back - z).norm() < 1e-13, "{} -> {} -> {}", z, w, back);
    }
}

#[test]
fn nc_partitions_are_counted_by_catalan() {
    for n in 0..=10 {
        let all = enumerate_nc(n).unwrap();
        assert_eq!(num_bigint::BigInt::from(all.len()), catalan(n as u64), "n = {n}");
        assert!(all.iter().all(|p| !p.has_crossing()));
    }
}

#[test]
fn legendre_endpoints() {
    for n in 0..=20 {
        assert_eq!(legendre(n, &Rational::one()), Rational::one());
        let sign = if n % 2 == 0 { Rational::one() } else { -Rational::one() };
        assert_eq!(legendre(n, &-Rational::one()), sign);
    }
}

#[test]
fn half_projection_cumulants_through_sixteen() {
    let t = projection_cumulants(&rational(1, 2), 16).unwrap();
    for n in (3..=15).step_by(2) {
        assert!(t.get(n).unwrap().is_zero());
    }
    for j in 1..=8u32 {
        let sign = if j % 2 == 1 { 1 } else { -1 };
        let want = Rational::new(catalan(j as u64 - 1) * sign, num_bigint::BigInt::from(4).pow(j));
        assert_eq!(t.get(2 * j as usize).unwrap(), &want);
    }
}

#[test]
fn moments_converge_to_stationary_values() {
    for k in [2u32, 3, 5] {
        let m = integrate_moments(&JacobiParams::for_k(k, 8), 40.0, 0.01).unwrap();
        let stat = stationary_moments_catalan(k, 8).unwrap();
        for (v, s) in m.last().iter().zip(&stat) {
            let s: f64 = freejacobi::scalar::Scalar::to_f64(s);
            assert!((v - s).abs() < 1e-8, "k = {k}: {v} vs {s}");
        }
    }
}

#[test]
fn rho0_coefficients_are_traces_of_powers() {
    for k in 2..=6u32 {
        let s = rho0_series::<Rational>(k, 12).unwrap();
        for n in 1..=12 {
            let want = tk_trace(k, 2 * n).unwrap() / Rational::from_integer(num_bigint::BigInt::from(k - 1).pow(n as u32));
            assert_eq!(s.coeff(n), want, "k = {k}, n = {n}");
        }
    }
}
