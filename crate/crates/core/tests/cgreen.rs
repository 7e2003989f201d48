use std::f64::consts::PI;

use jdisc_core::cgreen::{
    analyze, cauchy_green, cg_quadrature_oracle, complex_derivative, inner_product, mono_count, real_inner, synthesize,
    Derivative, DiscGrid, GridValues, SpectralField,
};
use jdisc_core::Error;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// 50 interior points on a spiral reaching radius 0.9.
fn test_points() -> Vec<C64> {
    (0..50)
        .map(|i| {
            let t = i as f64 / 49.0;
            C64::from_polar(0.05 + 0.85 * t, 2.4 * i as f64)
        })
        .collect()
}

fn field(degree: usize, coeffs: Vec<(f64, f64)>) -> SpectralField {
    let coeffs = coeffs.into_iter().map(|(re, im)| c(re, im)).collect();
    SpectralField::from_coeffs(1, degree, coeffs)
}

fn complex_field(max_degree: usize) -> impl Strategy<Value = SpectralField> {
    (0..=max_degree).prop_flat_map(|d| {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), mono_count(d)).prop_map(move |v| field(d, v))
    })
}

fn real_field(max_degree: usize) -> impl Strategy<Value = SpectralField> {
    (0..=max_degree).prop_flat_map(|d| {
        prop::collection::vec(-1.0..1.0f64, mono_count(d))
            .prop_map(move |v| field(d, v.into_iter().map(|x| (x, 0.0)).collect()))
    })
}

#[test]
fn t_of_one_matches_oracle() {
    let t = cauchy_green(&SpectralField::constant(c(1.0, 0.0)), false).unwrap();
    for z in test_points() {
        let oracle = cg_quadrature_oracle(|_| c(1.0, 0.0), z);
        assert!((t.eval(z)[0] - oracle).norm() < 1e-6, "at {z}");
        assert!((oracle - z.conj()).norm() < 1e-6);
    }
}

#[test]
fn t_of_zeta_squared_matches_closed_form_and_oracle() {
    let u = SpectralField::monomial(2, 0, c(1.0, 0.0));
    let t = cauchy_green(&u, false).unwrap();
    let back = complex_derivative(&t, Derivative::ZetaBar);
    assert_eq!((&back - &u).max_abs_coeff(), 0.0);
    for z in test_points() {
        let closed = z * z * z.conj() - z;
        let oracle = cg_quadrature_oracle(|w| w * w, z);
        assert!((t.eval(z)[0] - closed).norm() < 1e-13);
        assert!((oracle - closed).norm() < 1e-6, "at {z}");
    }
}

#[test]
fn oracle_closed_forms_at_sample_points() {
    assert!((cg_quadrature_oracle(|_| c(1.0, 0.0), c(0.3, 0.0)) - c(0.3, 0.0)).norm() < 1e-6);
    assert!((cg_quadrature_oracle(|w| w, c(0.5, 0.0)) - c(-0.75, 0.0)).norm() < 1e-6);
}

#[test]
fn oracle_agrees_with_mixed_polynomial() {
    let u = SpectralField::scalar_from_terms(&[(1, 0, c(3.0, 0.0)), (1, 1, c(0.0, 1.0)), (0, 2, c(-0.5, 0.25))]);
    let t = cauchy_green(&u, false).unwrap();
    for z in test_points().into_iter().step_by(5) {
        let oracle = cg_quadrature_oracle(|w| u.eval(w)[0], z);
        assert!((t.eval(z)[0] - oracle).norm() < 1e-6, "at {z}");
    }
}

#[test]
fn centered_transform_of_zeta_bar() {
    let t = cauchy_green(&SpectralField::monomial(0, 1, c(1.0, 0.0)), true).unwrap();
    assert_eq!(t.get(0, 0, 2), c(0.5, 0.0));
    assert_eq!(t.terms().filter(|x| x.3 != c(0.0, 0.0)).count(), 1);
    assert_eq!(t.value_at_zero()[0], c(0.0, 0.0));
}

#[test]
fn derivative_examples() {
    let d = complex_derivative(&SpectralField::monomial(1, 1, c(1.0, 0.0)), Derivative::ZetaBar);
    assert_eq!(d, SpectralField::monomial(1, 0, c(1.0, 0.0)).with_degree(d.degree()));
    let d = complex_derivative(&SpectralField::monomial(2, 1, c(1.0, 0.0)), Derivative::Zeta);
    assert_eq!(d.get(0, 1, 1), c(2.0, 0.0));
    assert_eq!(d.max_abs_coeff(), 2.0);
}

#[test]
fn inner_product_examples() {
    let one = SpectralField::constant(c(1.0, 0.0));
    let z = SpectralField::monomial(1, 0, c(1.0, 0.0));
    let zb = SpectralField::monomial(0, 1, c(1.0, 0.0));
    assert!((inner_product(&one, &one, true).unwrap() - c(PI, 0.0)).norm() < 1e-14);
    // polar integral 2π∫₀¹ r³ dr
    let polar = 2.0 * PI * 0.25;
    assert!((inner_product(&z, &z, true).unwrap() - c(polar, 0.0)).norm() < 1e-14);
    assert_eq!(inner_product(&z, &zb, true).unwrap(), c(0.0, 0.0));
    assert!(matches!(
        inner_product(&one, &SpectralField::constant_vector(&[c(1.0, 0.0); 2]), true),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn analyze_examples() {
    let grid = DiscGrid::for_degree(16);
    let ones = GridValues::from_fn(&grid, 1, |_| vec![c(1.0, 0.0)]);
    let f = analyze(&ones, &grid, 16).unwrap();
    assert!((&f - &SpectralField::constant(c(1.0, 0.0))).max_abs_coeff() < 1e-10);

    let vals = GridValues::from_fn(&grid, 1, |z| vec![z * z * z.conj()]);
    let f = analyze(&vals, &grid, 16).unwrap();
    assert!((&f - &SpectralField::monomial(2, 1, c(1.0, 0.0))).max_abs_coeff() < 1e-10);

    let coarse = DiscGrid::new(4, 8);
    assert!(matches!(analyze(&ones, &coarse, 16), Err(Error::UnderResolved { .. })));
}

#[test]
fn exp_resynthesis_is_tail_limited() {
    let grid = DiscGrid::for_degree(16);
    let vals = GridValues::from_fn(&grid, 1, |z| vec![z.exp() / 2.0]);
    let f = analyze(&vals, &grid, 16).unwrap();
    let back = synthesize(&f, &grid);
    let resid = (0..grid.len()).map(|p| (back.at(0, p) - vals.at(0, p)).norm()).fold(0.0, f64::max);
    // Taylor tail of e^ζ/2 beyond degree 16 on the unit disc
    let tail: f64 = (17..40).map(|k| 0.5 / (1..=k).map(|j| j as f64).product::<f64>()).sum();
    assert!(resid < 1e-12 && tail < 1e-14, "resid {resid}, tail {tail}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dbar_inverts_t(u in complex_field(12)) {
        let back = complex_derivative(&cauchy_green(&u, false).unwrap(), Derivative::ZetaBar);
        prop_assert!((&back - &u).max_abs_coeff() < 1e-15);
    }

    #[test]
    fn centering_vanishes_at_origin(u in complex_field(12)) {
        let t = cauchy_green(&u, true).unwrap();
        prop_assert_eq!(t.value_at_zero()[0], c(0.0, 0.0));
    }

    #[test]
    fn t_adjoint_is_minus_conjugate(u in real_field(8), v in real_field(8)) {
        let lhs = real_inner(&cauchy_green(&u, false).unwrap(), &v);
        let adj = cauchy_green(&v.conj(), false).unwrap().conj();
        let rhs = -real_inner(&u, &adj);
        prop_assert!((lhs - rhs).abs() < 1e-10, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn conjugation_is_self_adjoint(u in complex_field(10), v in complex_field(10)) {
        let lhs = real_inner(&u.conj(), &v);
        let rhs = real_inner(&u, &v.conj());
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn grid_gram_matches_exact_rule(u in complex_field(8), v in complex_field(8)) {
        let grid = DiscGrid::for_degree(8);
        let quad = synthesize(&u, &grid).inner(&synthesize(&v, &grid), &grid);
        let exact = inner_product(&u, &v, true).unwrap();
        prop_assert!((quad - exact).norm() < 1e-10, "{} vs {}", quad, exact);
    }

    #[test]
    fn analyze_inverts_synthesize(u in complex_field(16)) {
        let grid = DiscGrid::for_degree(16);
        let vals = synthesize(&u, &grid);
        let back = analyze(&vals, &grid, 16).unwrap();
        let again = synthesize(&back, &grid);
        let err = (0..grid.len()).map(|p| (again.at(0, p) - vals.at(0, p)).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10, "values {err}");
        // monomial coefficients at degree 16 are conditioned around 1e-10
        prop_assert!((&back - &u).max_abs_coeff() < 1e-9);
    }
}
