//! The acceptance suite: twelve end-to-end checks with their tolerances and
//! oracle tags, shared by the integration tests and the command-line self-test.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cgreen::{
    cauchy_green, cg_quadrature_oracle, complex_derivative, inner_product, mono_count, Derivative,
    DiscGrid, GridValues, HolomorphicDatum, SpectralField,
};
use crate::discsolve::{
    immersion_margin, solve_disc, solve_disc_target, spanning_family_at, transversality_perturb,
    transversality_report, whitney_perturb, DiscProblem, JetSubmanifold, PerturbOptions,
    SolverOptions,
};
use crate::error::Result;
use crate::poly::{PolynomialMap, Var};
use crate::structure::{a_from_j, j_from_a, nijenhuis_tensor, StructureChart};
use crate::vekua::{
    apply_adjoint, apply_operator, build_modification, default_eps, default_sample_points,
    jet_eval, jet_sigma_min, kernel_basis, spanning_family, DiscretizedOperator, JetSolver,
    JetVector, LinearCRSystem, LinearSolver, OperatorMode, VekuaConfig,
};

/// How a reference value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Oracle {
    /// Independent computation in the check itself.
    Derived,
    /// Holds by inspection.
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceConfig {
    /// Degree budget `N` of the discretization.
    pub degree: usize,
    pub seed: u64,
    /// Floor for the tolerances of truncation-sensitive checks (used for
    /// coarse budgets); exact-arithmetic checks ignore it.
    pub tol_floor: f64,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        Self {
            degree: 16,
            seed: 20240611,
            tol_floor: 0.0,
        }
    }
}

impl AcceptanceConfig {
    /// Self-test settings for a degree budget: below the default budget the
    /// truncation-sensitive tolerances are relaxed to `1e−4`.
    pub fn for_degree(degree: usize) -> Self {
        Self {
            degree,
            tol_floor: if degree < 16 { 1e-4 } else { 0.0 },
            ..Self::default()
        }
    }

    fn tol(&self, t: f64) -> f64 {
        t.max(self.tol_floor)
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    /// Worst measured value of the quantity compared against `tolerance`.
    pub value: f64,
    pub tolerance: f64,
    /// `"<"`, `">"` or `"="` relation of `value` to `tolerance` required to pass.
    pub relation: String,
    pub oracle: Oracle,
    pub detail: String,
}

impl CriterionResult {
    /// One line of the pass/fail table.
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<40} value {:<11.3e} {} {:<9.1e} ({:?}) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.value,
            self.relation,
            self.tolerance,
            self.oracle,
            self.detail
        )
    }
}

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "cauchy-green exactness"),
    (2, "structure round trip"),
    (3, "integrability classifier"),
    (4, "adjoint identities"),
    (5, "scalar kernel triviality"),
    (6, "modification invertibility and centering"),
    (7, "manufactured linear solve"),
    (8, "jet prescription and spanning family"),
    (9, "constant-structure nonlinear oracle"),
    (10, "manufactured nonlinear solve"),
    (11, "whitney perturbation"),
    (12, "transversality"),
];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rng_for(cfg: &AcceptanceConfig, id: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(31).wrapping_add(id as u64))
}

fn random_c(rng: &mut ChaCha8Rng) -> C64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_field(rng: &mut ChaCha8Rng, ncomp: usize, degree: usize, scale: f64) -> SpectralField {
    let coeffs = (0..ncomp * mono_count(degree))
        .map(|_| random_c(rng) * scale)
        .collect();
    SpectralField::from_coeffs(ncomp, degree, coeffs)
}

fn random_point(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    C64::from_polar(radius * rng.random::<f64>().sqrt(), rng.random_range(0.0..TAU))
}

/// Taylor polynomial of `1/(2+ζ)`.
pub fn inverse_two_plus_zeta(degree: usize) -> SpectralField {
    let terms: Vec<_> = (0..=degree)
        .map(|k| (k, 0, c((-0.5f64).powi(k as i32) / 2.0, 0.0)))
        .collect();
    SpectralField::scalar_from_terms(&terms)
}

/// Truncation used for `1/(2+ζ)` in the manufactured linear solve; the
/// discarded tail is below `2^{−40}`.
pub const INVERSE_TRUNCATION: usize = 40;

fn monomial(n: usize, comp: usize, m: usize, l: usize, v: C64) -> SpectralField {
    let mut f = SpectralField::zeros(n, m + l);
    f.set(comp, m, l, v);
    f
}

struct Outcome {
    passed: bool,
    value: f64,
    tolerance: f64,
    relation: &'static str,
    oracle: Oracle,
    detail: String,
}

impl Outcome {
    fn below(value: f64, tolerance: f64, oracle: Oracle, detail: String) -> Self {
        Self {
            passed: value < tolerance,
            value,
            tolerance,
            relation: "<",
            oracle,
            detail,
        }
    }

    fn above(value: f64, tolerance: f64, oracle: Oracle, detail: String) -> Self {
        Self {
            passed: value > tolerance,
            value,
            tolerance,
            relation: ">",
            oracle,
            detail,
        }
    }

    fn and(mut self, ok: bool, note: &str) -> Self {
        if !ok {
            self.passed = false;
            self.detail = format!("{}; FAILED: {note}", self.detail);
        }
        self
    }
}

fn criterion_1(cfg: &AcceptanceConfig) -> Result<Outcome> {
    let mut points = Vec::with_capacity(25);
    for r in [0.1, 0.3, 0.5, 0.7, 0.85] {
        for j in 0..5 {
            points.push(C64::from_polar(r, TAU * (j as f64 + 0.3 * r) / 5.0));
        }
    }
    let mut worst: f64 = 0.0;
    let mut dbar: f64 = 0.0;
    for d in 0..=12usize {
        for m in 0..=d {
            let l = d - m;
            let u = SpectralField::monomial(m, l, c(1.0, 0.0));
            let tu = cauchy_green(&u, false)?;
            let back = complex_derivative(&tu, Derivative::ZetaBar);
            dbar = dbar.max((&back - &u).max_abs_coeff());
            for &z in &points {
                let oracle = cg_quadrature_oracle(|w| w.powu(m as u32) * w.conj().powu(l as u32), z);
                worst = worst.max((tu.eval(z)[0] - oracle).norm());
            }
        }
    }
    let tol = cfg.tol(1e-6);
    Ok(Outcome::below(
        worst,
        tol,
        Oracle::Derived,
        format!("91 monomials x 25 points vs quadrature; dbar(T) defect {dbar:.1e}"),
    )
    .and(dbar < 1e-12, "dbar(T) = id to 1e-12"))
}

fn criterion_2(cfg: &AcceptanceConfig) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 2);
    let mut round: f64 = 0.0;
    let mut square: f64 = 0.0;
    for trial in 0..100 {
        let n = 1 + trial % 3;
        let raw = DMatrix::from_fn(n, n, |_, _| random_c(&mut rng));
        let norm = raw.clone().svd(false, false).singular_values.max();
        let a = raw * C64::from(rng.random_range(0.05..0.8) / norm);
        let j = j_from_a(&a)?;
        let a2 = a_from_j(&j)?;
        let j2 = j_from_a(&a2)?;
        round = round.max(j2.sub(&j).norm()).max((&a2 - &a).norm());
        square = square.max(j.square_defect());
    }
    let tol = 1e-10;
    Ok(Outcome::below(
        round,
        tol,
        Oracle::Derived,
        format!("100 pairs, n <= 3; max |J^2 + I| = {square:.1e}"),
    )
    .and(square < 1e-12, "J^2 = -I to 1e-12"))
}

fn criterion_3(cfg: &AcceptanceConfig) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 3);
    let mut constant_asym: f64 = 0.0;
    for n in 1..=3 {
        let a = DMatrix::from_fn(n, n, |_, _| random_c(&mut rng) * 0.2);
        let chart = StructureChart::constant(&a)?;
        let z: Vec<C64> = (0..n).map(|_| random_c(&mut rng) * 0.5).collect();
        constant_asym = constant_asym.max(nijenhuis_tensor(&chart, c(0.2, 0.1), &z, 1e-12).max_asymmetry);
    }
    let mut entries = vec![PolynomialMap::zero(2); 4];
    entries[0] = PolynomialMap::monomial(2, c(1.0, 0.0), &[(Var::ZBar(1), 1)]);
    let chart = StructureChart::new(2, entries, vec![], 0.5)?;
    let mut dev: f64 = 0.0;
    let mut integrable = false;
    for z in [[c(0.0, 0.0), c(0.0, 0.0)], [c(0.1, 0.0), c(0.0, 0.2)], [c(-0.2, 0.1), c(0.3, -0.1)]] {
        let r = nijenhuis_tensor(&chart, c(0.0, 0.0), &z, 1e-12);
        dev = dev.max((r.max_asymmetry - 1.0).abs());
        integrable |= r.integrable;
    }
    Ok(Outcome::below(
        dev,
        1e-10,
        Oracle::Derived,
        format!("|asymmetry - 1| for a11 = conj(z2); constant-A asymmetry {constant_asym:.1e}"),
    )
    .and(constant_asym < 1e-12, "constant A integrable")
    .and(!integrable, "a11 = conj(z2) classified non-integrable"))
}

fn criterion_4(cfg: &AcceptanceConfig) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 4);
    let grid = DiscGrid::default();
    let mut worst_t: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    for _ in 0..20 {
        let u = random_field(&mut rng, 1, 8, 1.0);
        let v = random_field(&mut rng, 1, 8, 1.0);
        let tu = cauchy_green(&u, false)?;
        let tbar_v = cauchy_green(&v.conj(), false)?.conj();
        let lhs = inner_product(&tu, &v, true)?.re;
        let rhs = inner_product(&u, &tbar_v.scale(c(-1.0, 0.0)), true)?.re;
        worst_t = worst_t.max((lhs - rhs).abs() / (u.l2_norm() * v.l2_norm()));

        let b1 = random_field(&mut rng, 4, 2, 0.5);
        let b2 = random_field(&mut rng, 4, 2, 0.5);
        let sys = LinearCRSystem::new(
            2,
            (0..4).map(|i| b1.component(i)).collect(),
            (0..4).map(|i| b2.component(i)).collect(),
        )?;
        let u = random_field(&mut rng, 2, 6, 1.0);
        let v = random_field(&mut rng, 2, 6, 1.0);
        let pu = apply_operator(&sys, &u, OperatorMode::P)?;
        let lhs = inner_product(&pu, &v, true)?.re;
        let pstar_v = apply_adjoint(&sys, &v, &grid)?;
        let rhs = GridValues::from_fn(&grid, 2, |z| u.eval(z)).inner(&pstar_v, &grid).re;
        worst_p = worst_p.max((lhs - rhs).abs() / (u.l2_norm() * v.l2_norm()));
    }
    Ok(Outcome::below(
        worst_t.max(worst_p),
        1e-8,
        Oracle::Derived,
        format!("relative defects: T {worst_t:.1e}, P {worst_p:.1e} (20 pairs each)"),
    ))
}

/// Random polynomial with sup norm on the closed disc at most `bound`.
fn bounded_coefficient(rng: &mut ChaCha8Rng, bound: f64) -> SpectralField {
    let f = random_field(rng, 1, 3, 1.0);
    let sup = f.sup_on(&DiscGrid::new(16, 64)).max(
        (0..256)
            .map(|j| f.eval(C64::from_polar(1.0, TAU * j as f64 / 256.0))[0].norm())
            .fold(0.0, f64::max),
    );
    f.scale(c(bound * rng.random_range(0.2..0.95) / sup, 0.0))
}

fn criterion_5(cfg: &AcceptanceConfig) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 5);
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let b1 = bounded_coefficient(&mut rng, 1.0);
        let b2 = bounded_coefficient(&mut rng, 1.0);
        let op = DiscretizedOperator::assemble(&LinearCRSystem::scalar(b1, b2), cfg.degree)?;
        worst = worst.min(op.sigma_min());
    }
    Ok(Outcome::above(
        worst,
        1e-3,
        Oracle::Derived,
        format!("min sigma over 20 random scalar systems at N = {}", cfg.degree),
    ))
}

fn criterion_6(cfg: &AcceptanceConfig) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 6);
    let mut worst_ratio = f64::INFINITY;
    let mut center: f64 = 0.0;
    let mut dims = Vec::new();
    for d in [1usize, 2, 1] {
        let sys = LinearCRSystem::scalar(
            bounded_coefficient(&mut rng, 0.5),
            bounded_coefficient(&mut rng, 0.5),
        );
        let op = DiscretizedOperator::assemble(&sys, cfg.degree.min(12))?;
        // project d holomorphic directions out of the range
        let mut dirs: Vec<DVector<f64>> = Vec::new();
        for j in 0..d {
            let w = monomial(1, 0, j + 1, 0, c(1.0, 0.0));
            let mut v = op.to_real(&w);
            for q in &dirs {
                let dot = q.dot(&v);
                v -= q * dot;
            }
            dirs.push(v.normalize());
        }
        let mut proj = DMatrix::identity(op.size(), op.size());
        for q in &dirs {
            proj -= q * q.transpose();
        }
        let def = op.with_matrix(&proj * op.matrix());
        let (kernel, sv) = kernel_basis(&def, 1e-6);
        dims.push(kernel.len());
        let eps = default_eps(&def);
        let m = build_modification(&def, &kernel, eps, 1e-6)?;
        let modified = def.modified(&m);
        worst_ratio = worst_ratio.min((modified.sigma_min() - sv.min()) / eps);
        // center coordinates of P̃x against those of x
        for _ in 0..5 {
            let x = modified.to_real(&random_field(&mut rng, 1, op.degree(), 1.0));
            let y = modified.matrix() * &x;
            center = center.max((y[0] - x[0]).abs()).max((y[1] - x[1]).abs());
        }
    }
    Ok(Outcome::above(
        worst_ratio,
        0.1,
        Oracle::Derived,
        format!("min sigma lift / eps; kernel dims {dims:?}; |P~u(0) - u(0)| = {center:.1e}"),
    )
    .and(dims == [1, 2, 1], "deficiency detected")
    .and(center == 0.0, "P~u(0) = u(0) exactly"))
}

fn criterion_7(cfg: &AcceptanceConfig) -> Result<Outcome> {
    let vc = VekuaConfig::with_degree(cfg.degree);
    let sys = LinearCRSystem::scalar(SpectralField::zeros(1, 0), inverse_two_plus_zeta(INVERSE_TRUNCATION));
    let solver = LinearSolver::new(&sys, &vc)?;
    let u = solver.solve_holomorphic(&HolomorphicDatum::constant(&[c(2.0, 0.0)]))?;
    let want = SpectralField::scalar_from_terms(&[(0, 0, c(2.0, 0.0)), (0, 1, c(1.0, 0.0))]);
    Ok(Outcome::below(
        (&u - &want).l2_norm(),
        cfg.tol(1e-7),
        Oracle::Derived,
        format!(
            "B2 = 1/(2+zeta) truncated at degree {INVERSE_TRUNCATION}; cond {:.1e}",
            solver.condition_number()
        ),
    ))
}

fn criterion_8(cfg: &AcceptanceConfig) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 8);
    let vc = VekuaConfig::with_degree(cfg.degree);
    let sys = LinearCRSystem::scalar(SpectralField::constant(c(0.3, -0.2)), inverse_two_plus_zeta(16));
    let jets = JetSolver::new(&sys, None, 3, &vc)?;
    let mut worst_jet: f64 = 0.0;
    for trial in 0..8 {
        let k = trial % 4;
        let values: Vec<Vec<C64>> = (0..=k).map(|_| vec![random_c(&mut rng)]).collect();
        let target = JetVector::new(c(0.0, 0.0), values);
        let u = jets.solve(&target)?;
        let got = jet_eval(&u, c(0.0, 0.0), k);
        worst_jet = worst_jet.max(got.distance(&target) / (1.0 + target.norm()));
    }
    let fam = spanning_family(&sys, None, 2, &default_sample_points(), &vc)?;
    let mut sigma = f64::INFINITY;
    for _ in 0..100 {
        sigma = sigma.min(jet_sigma_min(&fam.members, random_point(&mut rng, 1.0), 2));
    }
    Ok(Outcome::below(
        worst_jet,
        cfg.tol(1e-7),
        Oracle::Derived,
        format!(
            "jets k <= 3 at 0; family of {} for 2-jets, min sigma at 100 points {sigma:.2e}",
            fam.members.len()
        ),
    )
    .and(sigma > 1e-6, "spanning family full rank"))
}

fn solver_options(cfg: &AcceptanceConfig) -> SolverOptions {
    SolverOptions {
        degree: cfg.degree,
        ..SolverOptions::default()
    }
}

fn criterion_9(cfg: &AcceptanceConfig) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 9);
    let mut worst: f64 = 0.0;
    let mut iters = 0;
    for trial in 0..10 {
        let n = 1 + trial % 2;
        let raw = DMatrix::from_fn(n, n, |_, _| random_c(&mut rng));
        let norm = raw.clone().svd(false, false).singular_values.max();
        let a = raw * C64::from(rng.random_range(0.05..0.5) / norm);
        let order = 1 + trial % 4;
        let mut taylor = vec![vec![c(0.0, 0.0); n]; order + 1];
        for t in taylor.iter_mut().skip(1) {
            for x in t.iter_mut() {
                *x = random_c(&mut rng);
            }
        }
        let phi = HolomorphicDatum::new(taylor);
        let phi = phi.scale(c(1.0 / phi.l2_norm(), 0.0));
        let problem = DiscProblem::new(StructureChart::constant(&a)?, solver_options(cfg))?;
        let sol = solve_disc(&problem, &phi)?;
        let pf = phi.to_field();
        let mut expect = pf.clone();
        for k in 0..n {
            for j in 0..n {
                let term = pf.component(j).conj().scale(a[(k, j)]);
                for (_, m, l, v) in term.terms() {
                    expect.add_at(k, m, l, v);
                }
            }
        }
        worst = worst.max((&sol.g - &expect).l2_norm());
        iters = iters.max(sol.iterations);
    }
    Ok(Outcome::below(
        worst,
        cfg.tol(1e-8),
        Oracle::Derived,
        format!("|g - (phi + A conj(phi))| over 10 trials, |phi| = 1; max Newton iterations {iters}"),
    )
    .and(iters <= 8, "Newton converges in <= 8 iterations"))
}

/// `A(z) = 0.2z`, `b = −0.4ζ²ζ̄`, solved by `g = ζ²`.
pub fn manufactured_chart() -> StructureChart {
    let a = PolynomialMap::z(1, 0).scale(c(0.2, 0.0));
    let b = PolynomialMap::monomial(1, c(-0.4, 0.0), &[(Var::Zeta, 2), (Var::ZetaBar, 1)]);
    StructureChart::new(1, vec![a], vec![b], 2.0).expect("valid manufactured chart")
}

fn criterion_10(cfg: &AcceptanceConfig) -> Result<Outcome> {
    let problem = DiscProblem::new(manufactured_chart(), solver_options(cfg))?;
    let exact = monomial(1, 0, 2, 0, c(1.0, 0.0));
    let phi = problem.forward_map(&exact)?;
    let sol = solve_disc_target(&problem, &phi, Some(&SpectralField::zeros(1, 0)))?;
    let err = (&sol.g - &exact).sup_on(problem.grid());
    Ok(Outcome::below(
        err.max(sol.cr_residual),
        cfg.tol(1e-7),
        Oracle::Derived,
        format!(
            "|g - zeta^2| = {err:.1e}, CR residual {:.1e}, {} Newton iterations",
            sol.cr_residual, sol.iterations
        ),
    ))
}

fn cusp_datum() -> HolomorphicDatum {
    let mut taylor = vec![vec![c(0.0, 0.0); 2]; 4];
    taylor[2][0] = c(1.0, 0.0);
    taylor[3][1] = c(1.0, 0.0);
    HolomorphicDatum::new(taylor)
}

fn criterion_11(cfg: &AcceptanceConfig) -> Result<Outcome> {
    let delta = 1e-4;
    let residual_tol = cfg.tol(1e-7);
    let mut worst_margin = f64::INFINITY;
    let mut worst_dist: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    let mut steps = usize::MAX;
    let mut notes = Vec::new();
    for (label, chart) in [
        ("A = 0", StructureChart::standard(2)),
        (
            "A = 0.2 I",
            StructureChart::constant(&DMatrix::from_diagonal_element(2, 2, c(0.2, 0.0)))?,
        ),
    ] {
        let problem = DiscProblem::new(chart, solver_options(cfg))?;
        let base = solve_disc(&problem, &cusp_datum())?;
        let fam = spanning_family_at(&problem, &base.g, 1)?;
        let opts = PerturbOptions {
            seed: cfg.seed,
            ..PerturbOptions::default()
        };
        let p = whitney_perturb(&problem, &base, &fam, delta, &opts)?;
        let margin = immersion_margin(&p.disc.g, problem.grid()).margin;
        worst_margin = worst_margin.min(margin);
        worst_dist = worst_dist.max(p.distance_sup);
        worst_res = p.homotopy.iter().map(|h| h.cr_residual).fold(worst_res, f64::max);
        steps = steps.min(p.homotopy.len() - 1);
        notes.push(format!(
            "{label}: margin {margin:.2e}, |s| {:.3}, draws {}",
            p.s_norm, p.attempts
        ));
    }
    Ok(Outcome::above(
        worst_margin,
        delta,
        Oracle::Derived,
        format!(
            "{}; distance {worst_dist:.3}; homotopy steps {steps}, max residual {worst_res:.1e}",
            notes.join("; ")
        ),
    )
    .and(worst_dist <= 0.1, "distance <= 0.1")
    .and(steps >= 8, "homotopy has >= 8 steps")
    .and(worst_res < residual_tol, "homotopy residual-admissible"))
}

fn criterion_12(cfg: &AcceptanceConfig) -> Result<Outcome> {
    let line = monomial(2, 0, 1, 0, c(1.0, 0.0));
    let cusp = &monomial(2, 0, 2, 0, c(1.0, 0.0)) + &monomial(2, 1, 3, 0, c(1.0, 0.0));
    let s = JetSubmanifold::jet_vanishing(2, 1, 1)?;
    let r1 = transversality_report(&line, &s)?;
    let r2 = transversality_report(&cusp, &s)?;
    let sigma = &PolynomialMap::z(2, 0) - &PolynomialMap::constant(2, c(0.5, 0.0));
    let r3 = transversality_report(&line, &JetSubmanifold::new(2, 0, vec![sigma])?)?;
    let verdicts = r1.transverse && r1.zero_count == 0 && !r2.transverse && r2.zero_count == 1 && r3.transverse;
    let margin_err = (r3.margin - 1.0).abs();

    let problem = DiscProblem::new(StructureChart::standard(2), solver_options(cfg))?;
    let base = solve_disc(&problem, &cusp_datum())?;
    let fam = spanning_family_at(&problem, &base.g, 1)?;
    let mut draws = Vec::new();
    let mut fixed = true;
    for seed in 0..5 {
        let opts = PerturbOptions {
            seed,
            ..PerturbOptions::default()
        };
        match transversality_perturb(&problem, &base, &fam, &s, &opts) {
            Ok((p, report)) => {
                fixed &= report.transverse;
                draws.push(p.attempts);
            }
            Err(_) => {
                fixed = false;
                draws.push(0);
            }
        }
    }
    Ok(Outcome::below(
        margin_err,
        1e-10,
        Oracle::Derived,
        format!(
            "verdicts {}/{}/{} (expected T/F/T), |margin - 1| for Re z1 = 0.5; perturbation draws per seed {draws:?}",
            tf(r1.transverse),
            tf(r2.transverse),
            tf(r3.transverse)
        ),
    )
    .and(verdicts, "verdicts reproduced")
    .and(fixed && draws.iter().all(|&d| (1..=16).contains(&d)), "perturbation fixes the cusp"))
}

fn tf(b: bool) -> char {
    if b {
        'T'
    } else {
        'F'
    }
}

/// Runs one criterion by number (1 to 12).
pub fn run_criterion(id: u8, cfg: &AcceptanceConfig) -> CriterionResult {
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, n)| n.to_string())
        .unwrap_or_else(|| format!("unknown criterion {id}"));
    let outcome = match id {
        1 => criterion_1(cfg),
        2 => criterion_2(cfg),
        3 => criterion_3(cfg),
        4 => criterion_4(cfg),
        5 => criterion_5(cfg),
        6 => criterion_6(cfg),
        7 => criterion_7(cfg),
        8 => criterion_8(cfg),
        9 => criterion_9(cfg),
        10 => criterion_10(cfg),
        11 => criterion_11(cfg),
        12 => criterion_12(cfg),
        _ => Err(crate::Error::Schema(format!("no criterion {id}"))),
    };
    match outcome {
        Ok(o) => CriterionResult {
            id,
            name,
            passed: o.passed,
            value: o.value,
            tolerance: o.tolerance,
            relation: o.relation.to_string(),
            oracle: o.oracle,
            detail: o.detail,
        },
        Err(e) => CriterionResult {
            id,
            name,
            passed: false,
            value: f64::NAN,
            tolerance: f64::NAN,
            relation: "-".into(),
            oracle: Oracle::Derived,
            detail: format!("error: {e}"),
        },
    }
}

/// Runs all twelve criteria in order.
pub fn run_all(cfg: &AcceptanceConfig) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|(id, _)| run_criterion(*id, cfg)).collect()
}
