use jdisc_core::poly::{PolyTermJson, PolynomialMap, Var};
use jdisc_core::structure::*;
use jdisc_core::Error;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

const I: C64 = C64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn zeros(n: usize) -> Vec<C64> {
    vec![c(0.0, 0.0); n]
}

/// Complex `n×n` matrices with Frobenius norm at most `0.6`.
fn small_matrix() -> impl Strategy<Value = DMatrix<C64>> {
    (1usize..=3).prop_flat_map(|n| {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
            let m = DMatrix::from_iterator(n, n, v.into_iter().map(|(re, im)| c(re, im)));
            let norm = m.norm();
            if norm > 0.6 {
                m * c(0.6 / norm, 0.0)
            } else {
                m
            }
        })
    })
}

/// Random polynomial in `ζ, ζ̄, z₁, z₂, z̄₁, z̄₂` of degree at most 3 per variable.
fn polynomial() -> impl Strategy<Value = PolynomialMap> {
    prop::collection::vec(((0u32..3, 0u32..3, 0u32..3, 0u32..3), (-1.0..1.0f64, -1.0..1.0f64)), 1..6).prop_map(
        |terms| {
            terms.into_iter().fold(PolynomialMap::zero(2), |acc, ((a, b, d, e), (re, im))| {
                let m = PolynomialMap::monomial(
                    2,
                    c(re, im),
                    &[(Var::Zeta, a), (Var::Z(0), b), (Var::ZBar(0), d), (Var::Z(1), e)],
                );
                &acc + &m
            })
        },
    )
}

#[test]
fn standard_j_has_zero_matrix() {
    let a = a_from_j(&RealLinearOp::standard(3)).unwrap();
    assert_eq!(a.norm(), 0.0);
    let j = j_from_a(&DMatrix::zeros(2, 2)).unwrap();
    assert!(j.sub(&RealLinearOp::standard(2)).norm() < 1e-15);
}

#[test]
fn half_structure_in_one_variable() {
    // J u = i(5/3 u − 4/3 ū); composing twice by hand gives −u
    let j = RealLinearOp::new(
        DMatrix::from_element(1, 1, I * (5.0 / 3.0)),
        DMatrix::from_element(1, 1, I * (-4.0 / 3.0)),
    );
    for u in [c(1.0, 0.0), c(0.0, 1.0), c(0.3, -0.7)] {
        let ju = I * (u * (5.0 / 3.0) - u.conj() * (4.0 / 3.0));
        let jju = I * (ju * (5.0 / 3.0) - ju.conj() * (4.0 / 3.0));
        assert!((jju + u).norm() < 1e-14);
        assert!((j.apply(&[u])[0] - ju).norm() < 1e-15);
    }
    let a = a_from_j(&j).unwrap();
    assert!((a[(0, 0)] - c(0.5, 0.0)).norm() < 1e-14);
    let back = j_from_a(&a).unwrap();
    assert!(back.sub(&j).norm() < 1e-14);
}

#[test]
fn rejects_invalid_structures() {
    let twice = RealLinearOp::new(DMatrix::from_element(1, 1, c(2.0, 0.0)), DMatrix::zeros(1, 1));
    assert!(matches!(a_from_j(&twice), Err(Error::NotAComplexStructure { .. })));
    // J = −J_st is a complex structure with J_st + J = 0
    let minus = RealLinearOp::new(DMatrix::from_element(1, 1, -I), DMatrix::zeros(1, 1));
    assert!(matches!(a_from_j(&minus), Err(Error::SingularStructure { .. })));
    assert!(matches!(
        j_from_a(&DMatrix::from_element(1, 1, c(1.0, 0.0))),
        Err(Error::SingularStructure { .. })
    ));
}

#[test]
fn constant_structure_is_integrable() {
    let a = DMatrix::from_row_slice(2, 2, &[c(0.1, 0.2), c(0.0, -0.3), c(0.2, 0.0), c(-0.1, 0.1)]);
    let chart = StructureChart::constant(&a).unwrap();
    let r = nijenhuis_tensor(&chart, c(0.2, 0.1), &[c(0.3, 0.0), c(0.0, -0.4)], 1e-12);
    assert!(r.tensor.iter().all(|v| v.norm() == 0.0));
    assert_eq!(r.max_asymmetry, 0.0);
    assert!(r.integrable);
}

#[test]
fn conjugate_coordinate_entry_is_not_integrable() {
    let mut entries = vec![PolynomialMap::zero(2); 4];
    entries[0] = PolynomialMap::monomial(2, c(1.0, 0.0), &[(Var::ZBar(1), 1)]);
    let chart = StructureChart::new(2, entries, vec![], 0.5).unwrap();
    let r = nijenhuis_tensor(&chart, c(0.0, 0.0), &zeros(2), 1e-12);
    assert_eq!(r.get(0, 0, 1), c(1.0, 0.0));
    assert_eq!(r.get(0, 1, 0), c(0.0, 0.0));
    assert_eq!(r.max_asymmetry, 1.0);
    assert!(!r.integrable);
}

#[test]
fn one_variable_is_always_integrable() {
    let a = &PolynomialMap::monomial(1, c(0.2, 0.0), &[(Var::ZBar(0), 2)])
        + &PolynomialMap::monomial(1, c(0.0, 0.1), &[(Var::Z(0), 1), (Var::Zeta, 1)]);
    let chart = StructureChart::new(1, vec![a], vec![], 1.0).unwrap();
    let r = nijenhuis_tensor(&chart, c(0.3, 0.3), &[c(0.5, -0.2)], 1e-12);
    assert_eq!(r.max_asymmetry, 0.0);
    assert!(r.integrable);
    assert!(r.get(0, 0, 0).norm() > 0.0);
}

#[test]
fn scalar_cr_residual_examples() {
    let standard = StructureChart::standard(2);
    let z = [c(0.2, 0.1), c(-0.3, 0.0)];
    let r = scalar_cr_residual(&|p: &[C64]| p[0], &standard, c(0.0, 0.0), &z, 1e-5);
    assert!(r.iter().all(|v| v.norm() < 1e-10));
    let r = scalar_cr_residual(&|p: &[C64]| p[0].conj(), &standard, c(0.0, 0.0), &z, 1e-5);
    assert!((r[0] - c(1.0, 0.0)).norm() < 1e-10 && r[1].norm() < 1e-10);

    let a = DMatrix::from_row_slice(2, 2, &[c(0.1, 0.0), c(0.0, 0.2), c(-0.2, 0.0), c(0.05, 0.05)]);
    let chart = StructureChart::constant(&a).unwrap();
    let r = scalar_cr_residual(&|p: &[C64]| p[0], &chart, c(0.0, 0.0), &z, 1e-5);
    let exact = scalar_cr_residual_exact(&PolynomialMap::z(2, 0), &chart, c(0.0, 0.0), &z);
    for k in 0..2 {
        assert!((r[k] - a[(0, k)]).norm() < 1e-10);
        assert_eq!(exact[k], a[(0, k)]);
    }
}

#[test]
fn validity_check_rejects_degenerate_charts() {
    // |a| = 1 on the unit circle of z₁
    let a = PolynomialMap::monomial(1, c(1.0, 0.0), &[(Var::Z(0), 1)]);
    assert!(matches!(
        StructureChart::new(1, vec![a.clone()], vec![], 1.0),
        Err(Error::SingularStructure { .. })
    ));
    assert!(StructureChart::new(1, vec![a], vec![], 0.5).is_ok());
}

#[test]
fn corrupted_structure_json_is_a_schema_error() {
    let bad = PolyTermJson {
        pz: vec![1, 0, 2],
        pzb: vec![],
        pzeta: [0, 0],
        c: [1.0, 0.0],
    };
    let json = StructureJson {
        n: 1,
        a: vec![vec![vec![bad]]],
        b: vec![],
        radius: None,
    };
    assert!(matches!(StructureChart::from_json(&json), Err(Error::Schema(_))));
}

#[test]
fn structure_json_round_trip() {
    let mut entries = vec![PolynomialMap::zero(2); 4];
    entries[1] = PolynomialMap::monomial(2, c(0.1, -0.2), &[(Var::Z(0), 1), (Var::ZetaBar, 2)]);
    entries[2] = PolynomialMap::constant(2, c(0.0, 0.3));
    let b = vec![PolynomialMap::z(2, 1).scale(c(0.5, 0.0)), PolynomialMap::zero(2)];
    let chart = StructureChart::new(2, entries, b, 0.8).unwrap();
    let text = serde_json::to_string(&chart.to_json()).unwrap();
    let parsed: StructureJson = serde_json::from_str(&text).unwrap();
    assert_eq!(StructureChart::from_json(&parsed).unwrap(), chart);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn a_to_j_round_trip(a in small_matrix()) {
        let j = j_from_a(&a).unwrap();
        prop_assert!(j.square_defect() < 1e-12);
        let a2 = a_from_j(&j).unwrap();
        prop_assert!(j_from_a(&a2).unwrap().sub(&j).norm() < 1e-10);
        prop_assert!((&a2 - &a).norm() < 1e-10);
    }

    #[test]
    fn complex_matrix_of_j_is_antilinear(a in small_matrix()) {
        // A v = Q v̄, so Q(iv) = −i Q(v) for v = e_k
        let n = a.nrows();
        let j = j_from_a(&a).unwrap();
        let a2 = a_from_j(&j).unwrap();
        let q = RealLinearOp::new(DMatrix::zeros(n, n), a2);
        for k in 0..n {
            let mut e = zeros(n);
            e[k] = c(1.0, 0.0);
            let ie: Vec<C64> = e.iter().map(|x| x * I).collect();
            let lhs = q.apply(&ie);
            let rhs = q.apply(&e);
            for (l, r) in lhs.iter().zip(&rhs) {
                prop_assert!((l + r * I).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_charts_are_integrable(a in small_matrix(), z in (-0.5..0.5f64, -0.5..0.5f64)) {
        let chart = StructureChart::constant(&a).unwrap();
        let p = vec![c(z.0, z.1); a.nrows()];
        prop_assert!(nijenhuis_tensor(&chart, c(0.0, 0.0), &p, 1e-12).integrable);
    }

    #[test]
    fn partials_match_central_differences(
        f in polynomial(),
        zeta in (-0.5..0.5f64, -0.5..0.5f64),
        z0 in (-0.5..0.5f64, -0.5..0.5f64),
        z1 in (-0.5..0.5f64, -0.5..0.5f64),
    ) {
        let zeta = c(zeta.0, zeta.1);
        let z = [c(z0.0, z0.1), c(z1.0, z1.1)];
        let h = 1e-4;
        for i in 0..2 {
            let diff = |dir: C64| {
                let mut p = z;
                let mut m = z;
                p[i] += dir * h;
                m[i] -= dir * h;
                (f.eval(zeta, &p) - f.eval(zeta, &m)) / (2.0 * h)
            };
            let (dx, dy) = (diff(c(1.0, 0.0)), diff(I));
            let wz = (dx - I * dy) * 0.5;
            let wzb = (dx + I * dy) * 0.5;
            prop_assert!((f.partial(Var::Z(i)).eval(zeta, &z) - wz).norm() < 1e-6);
            prop_assert!((f.partial(Var::ZBar(i)).eval(zeta, &z) - wzb).norm() < 1e-6);
        }
    }
}
