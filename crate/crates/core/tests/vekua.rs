use jdisc_core::cgreen::{
    cauchy_green, inner_product, mono_count, DiscGrid, GridValues, HolomorphicDatum, SpectralField,
};
use jdisc_core::vekua::*;
use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn zero_field() -> SpectralField {
    SpectralField::zeros(1, 0)
}

/// Taylor polynomial of `1/(2+ζ)` to the given degree.
fn inverse_two_plus_zeta(degree: usize) -> SpectralField {
    let terms: Vec<_> = (0..=degree)
        .map(|k| (k, 0, c((-1f64).powi(k as i32) / 2f64.powi(k as i32 + 1), 0.0)))
        .collect();
    SpectralField::scalar_from_terms(&terms)
}

fn random_field(rng: &mut ChaCha8Rng, ncomp: usize, degree: usize, scale: f64) -> SpectralField {
    let coeffs = (0..ncomp * mono_count(degree))
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale)
        .collect();
    SpectralField::from_coeffs(ncomp, degree, coeffs)
}

#[test]
fn p_reduces_to_identity_without_coefficients() {
    let sys = LinearCRSystem::zero(1);
    let u = SpectralField::monomial(2, 0, c(1.0, 0.0));
    let pu = apply_operator(&sys, &u, OperatorMode::P).unwrap();
    assert_eq!((&pu - &u).max_abs_coeff(), 0.0);
}

#[test]
fn p_with_unit_b2_on_constant() {
    let sys = LinearCRSystem::scalar(zero_field(), SpectralField::constant(c(1.0, 0.0)));
    let pu = apply_operator(&sys, &SpectralField::constant(c(1.0, 0.0)), OperatorMode::P).unwrap();
    let want = SpectralField::scalar_from_terms(&[(0, 0, c(1.0, 0.0)), (0, 1, c(-1.0, 0.0))]);
    assert!((&pu - &want).max_abs_coeff() < 1e-15);
}

#[test]
fn matrix_matches_functional_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let b1 = random_field(&mut rng, 1, 3, 0.3);
    let b2 = random_field(&mut rng, 1, 3, 0.3);
    let sys = LinearCRSystem::scalar(b1, b2);
    let op = DiscretizedOperator::assemble(&sys, 8).unwrap();
    let u = random_field(&mut rng, 1, 8, 1.0);
    let via_matrix = op.matrix() * op.to_real(&u);
    let exact = apply_operator(&sys, &u, OperatorMode::P).unwrap();
    // exact image projected; the center slot comes from u itself
    let mut want = op.basis().to_real(&exact, true);
    let center = op.basis().to_real(&u, false);
    want[0] = center[0];
    want[1] = center[1];
    assert!((via_matrix - want).amax() < 1e-12);
}

#[test]
fn adjoint_identity_via_grid_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grid = DiscGrid::default();
    for _ in 0..5 {
        let b1 = random_field(&mut rng, 4, 2, 0.5);
        let b2 = random_field(&mut rng, 4, 2, 0.5);
        let sys = LinearCRSystem::new(
            2,
            (0..4).map(|i| b1.component(i)).collect(),
            (0..4).map(|i| b2.component(i)).collect(),
        )
        .unwrap();
        let u = random_field(&mut rng, 2, 6, 1.0);
        let v = random_field(&mut rng, 2, 6, 1.0);
        let pu = apply_operator(&sys, &u, OperatorMode::P).unwrap();
        let lhs = inner_product(&pu, &v, true).unwrap().re;
        let pstar_v = apply_adjoint(&sys, &v, &grid).unwrap();
        let uv = GridValues::from_fn(&grid, 2, |z| u.eval(z));
        let rhs = uv.inner(&pstar_v, &grid).re;
        assert!(
            (lhs - rhs).abs() < 1e-8 * u.l2_norm() * v.l2_norm(),
            "{lhs} vs {rhs}"
        );
    }
}

#[test]
fn scalar_kernel_is_trivial() {
    let b1 = SpectralField::scalar_from_terms(&[(1, 0, c(1.0, 0.0)), (3, 0, c(-1.0 / 6.0, 0.0))]);
    let sys = LinearCRSystem::scalar(b1, inverse_two_plus_zeta(16));
    let op = DiscretizedOperator::assemble(&sys, 16).unwrap();
    let (kernel, sv) = kernel_basis(&op, 1e-6);
    assert!(kernel.is_empty());
    assert!(sv.min() > 1e-3);
}

#[test]
fn block_diagonal_kernel_is_trivial() {
    let a = LinearCRSystem::scalar(SpectralField::constant(c(0.5, 0.0)), zero_field());
    let b = LinearCRSystem::scalar(zero_field(), SpectralField::monomial(1, 0, c(0.0, 0.7)));
    let sys = LinearCRSystem::block_diagonal(&[a, b]);
    assert_eq!(sys.n(), 2);
    let op = DiscretizedOperator::assemble(&sys, 10).unwrap();
    assert!(kernel_basis(&op, 1e-6).0.is_empty());
}

fn deficient(op: &DiscretizedOperator) -> (DiscretizedOperator, DVector<f64>) {
    let w = SpectralField::scalar_from_terms(&[(1, 0, c(1.0, 0.0)), (2, 0, c(1.0, 0.0))]);
    let mut dir = op.to_real(&w);
    dir /= dir.norm();
    let proj = nalgebra::DMatrix::identity(op.size(), op.size()) - &dir * dir.transpose();
    (op.with_matrix(&proj * op.matrix()), dir)
}

#[test]
fn modification_lifts_artificial_deficiency() {
    let sys = LinearCRSystem::scalar(
        SpectralField::constant(c(0.2, 0.1)),
        SpectralField::monomial(1, 0, c(0.3, 0.0)),
    );
    let op = DiscretizedOperator::assemble(&sys, 12).unwrap();
    let (def, _) = deficient(&op);
    let (kernel, sv) = kernel_basis(&def, 1e-6);
    assert_eq!(kernel.len(), 1);
    let eps = default_eps(&def);
    let m = build_modification(&def, &kernel, eps, 1e-6).unwrap();
    assert_eq!(m.d(), 1);
    assert!(m.corrections()[0].vanishes_at_zero());
    assert!((m.corrections()[0].l2_norm() - eps).abs() < 1e-12 * eps);
    let lifted = def.modified(&m).sigma_min();
    assert!(lifted > sv.min() + 0.1 * eps, "lifted {lifted:e}, eps {eps:e}");

    let half = build_modification(&def, &kernel, eps / 2.0, 1e-6).unwrap();
    assert!((half.corrections()[0].l2_norm() - eps / 2.0).abs() < 1e-12 * eps);
    assert!(def.modified(&half).sigma_min() > 0.0);

    // centering survives the modification
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = random_field(&mut rng, 1, 12, 1.0);
    let mod_op = def.modified(&m);
    let img = mod_op.apply(&u);
    assert!((img.eval(c(0.0, 0.0))[0] - u.eval(c(0.0, 0.0))[0]).norm() < 1e-12);
}

#[test]
fn empty_kernel_gives_empty_modification() {
    let op = DiscretizedOperator::assemble(&LinearCRSystem::zero(1), 6).unwrap();
    let m = build_modification(&op, &[], 1e-3, 1e-6).unwrap();
    assert!(m.is_empty());
    assert_eq!(op.modified(&m).matrix(), op.matrix());
}

#[test]
fn trivial_and_nonhomogeneous_solves() {
    let cfg = VekuaConfig::with_degree(8);
    let sys = LinearCRSystem::zero(1);
    let phi = HolomorphicDatum::new(vec![vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]]);
    let u = solve_linear(&sys, None, LinearRhs::Holomorphic(&phi), &cfg).unwrap();
    assert!((&u - &phi.to_field()).max_abs_coeff() < 1e-13);

    let psi = SpectralField::constant(c(1.0, 0.0));
    let u = solve_linear(&sys, None, LinearRhs::NonHomogeneous(&psi), &cfg).unwrap();
    let want = cauchy_green(&psi, false).unwrap();
    assert!((&u - &want).max_abs_coeff() < 1e-13);
}

#[test]
fn manufactured_linear_solution() {
    let cfg = VekuaConfig::default();
    let sys = LinearCRSystem::scalar(zero_field(), inverse_two_plus_zeta(40));
    let solver = LinearSolver::new(&sys, &cfg).unwrap();
    let u = solver.solve_holomorphic(&HolomorphicDatum::constant(&[c(2.0, 0.0)])).unwrap();
    let want = SpectralField::scalar_from_terms(&[(0, 0, c(2.0, 0.0)), (0, 1, c(1.0, 0.0))]);
    let err = (&u - &want).l2_norm();
    assert!(err < 1e-7, "err = {err:e}");
    let report = solver.report(&u, None);
    assert!(report.residual_norm < 1e-7 * u.l2_norm());
    assert!((report.center_value[0][0] - 2.0).abs() < 1e-12);
}

#[test]
fn nonhomogeneous_residual_is_small() {
    let cfg = VekuaConfig::default();
    let sys = LinearCRSystem::scalar(
        SpectralField::constant(c(0.3, 0.0)),
        SpectralField::monomial(1, 0, c(0.0, 0.4)),
    );
    let solver = LinearSolver::new(&sys, &cfg).unwrap();
    let psi = SpectralField::scalar_from_terms(&[(0, 0, c(1.0, 0.0)), (1, 1, c(0.0, 0.5))]);
    let u = solver.solve_nonhomogeneous(&psi).unwrap();
    let res = sys.residual(&u, Some(&psi)).l2_norm();
    assert!(res < 1e-7 * u.l2_norm(), "res = {res:e}");
}

#[test]
fn jet_eval_examples() {
    let j = jet_eval(&SpectralField::monomial(2, 0, c(1.0, 0.0)), c(0.0, 0.0), 2);
    assert_eq!(j.value(2)[0], c(2.0, 0.0));
    assert_eq!(j.value(1)[0], c(0.0, 0.0));
    let u = SpectralField::scalar_from_terms(&[(0, 0, c(2.0, 0.0)), (0, 1, c(1.0, 0.0))]);
    let j = jet_eval(&u, c(0.0, 0.0), 1);
    assert_eq!((j.value(0)[0], j.value(1)[0]), (c(2.0, 0.0), c(0.0, 0.0)));
    let j = jet_eval(&SpectralField::monomial(2, 1, c(1.0, 0.0)), c(0.5, 0.0), 1);
    assert!((j.value(0)[0] - c(0.125, 0.0)).norm() < 1e-15);
    assert!((j.value(1)[0] - c(0.5, 0.0)).norm() < 1e-15);
}

#[test]
fn jets_without_coefficients_are_polynomials() {
    let cfg = VekuaConfig::with_degree(8);
    let target = JetVector::new(c(0.0, 0.0), vec![vec![c(1.0, 2.0)], vec![c(-0.5, 0.0)]]);
    let u = solve_with_jet(&LinearCRSystem::zero(1), None, &target, &cfg).unwrap();
    let want = SpectralField::scalar_from_terms(&[(0, 0, c(1.0, 2.0)), (1, 0, c(-0.5, 0.0))]);
    assert!((&u - &want).max_abs_coeff() < 1e-12);

    let zero = JetVector::new(c(0.0, 0.0), vec![vec![c(0.0, 0.0)]; 3]);
    let u = solve_with_jet(&LinearCRSystem::zero(1), None, &zero, &cfg).unwrap();
    assert!(u.max_abs_coeff() < 1e-15);
}

#[test]
fn random_jets_are_recovered() {
    let cfg = VekuaConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let sys = LinearCRSystem::scalar(
        SpectralField::constant(c(0.3, -0.2)),
        inverse_two_plus_zeta(16),
    );
    let jets = JetSolver::new(&sys, None, 3, &cfg).unwrap();
    for k in 0..=3 {
        let values: Vec<Vec<C64>> = (0..=k)
            .map(|_| vec![c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))])
            .collect();
        let target = JetVector::new(c(0.0, 0.0), values);
        let u = jets.solve(&target).unwrap();
        let got = jet_eval(&u, c(0.0, 0.0), k);
        assert!(got.distance(&target) < 1e-7 * (1.0 + target.norm()));
    }
}

#[test]
fn monomial_spanning_family() {
    let cfg = VekuaConfig::with_degree(8);
    let fam = spanning_family(&LinearCRSystem::zero(1), None, 1, &default_sample_points(), &cfg).unwrap();
    assert_eq!(fam.members.len(), 4);
    let want = [
        SpectralField::constant(c(1.0, 0.0)),
        SpectralField::constant(c(0.0, 1.0)),
        SpectralField::monomial(1, 0, c(1.0, 0.0)),
        SpectralField::monomial(1, 0, c(0.0, 1.0)),
    ];
    for (m, w) in fam.members.iter().zip(&want) {
        assert!((m - w).max_abs_coeff() < 1e-12);
    }
    assert!(fam.min_sigma > 0.0);
}

#[test]
fn spanning_family_full_rank_at_random_points() {
    let cfg = VekuaConfig::with_degree(10);
    let fam = spanning_family(&LinearCRSystem::zero(1), None, 2, &default_sample_points(), &cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let z = C64::from_polar(rng.random::<f64>().sqrt(), rng.random_range(0.0..std::f64::consts::TAU));
        assert!(jet_sigma_min(&fam.members, z, 2) > 1e-6);
    }
}

#[test]
fn manufactured_scalar_family_spans_values() {
    let cfg = VekuaConfig::default();
    let sys = LinearCRSystem::scalar(zero_field(), inverse_two_plus_zeta(16));
    let fam = spanning_family(&sys, None, 0, &default_sample_points(), &cfg).unwrap();
    assert_eq!(fam.members.len(), 2);
    assert!(fam.min_sigma > 1e-2);
}

