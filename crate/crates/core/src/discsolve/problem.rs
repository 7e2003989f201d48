use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cgreen::{
    cauchy_green, complex_derivative, synthesize, Analyzer, Derivative, DiscBasis, DiscGrid,
    GridValues, HolomorphicDatum, SpectralField,
};
use crate::error::{Error, Result};
use crate::poly::{PolynomialMap, Var};
use crate::structure::StructureChart;
use crate::vekua::{
    build_modification, default_eps, kernel_basis, DiscretizedOperator, FredholmModification,
    LinearCRSystem, VekuaConfig,
};

/// Iteration used by [`super::solve_disc`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Picard,
    Newton,
    Continuation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub method: Method,
    /// Target for `‖F(g) − φ‖`.
    pub tol: f64,
    pub max_iter: usize,
    /// Degree budget `N`.
    pub degree: usize,
    /// Use `T₀` (so `g(0) = φ(0)`); otherwise plain `T`.
    pub centered: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: Method::Newton,
            tol: 1e-11,
            max_iter: 30,
            degree: 16,
            centered: true,
        }
    }
}

/// Residual of the disc equation on the grid.
#[derive(Debug, Clone)]
pub struct CrResidual {
    pub field: SpectralField,
    /// Largest pointwise norm over the grid.
    pub sup_norm: f64,
}

/// The nonlinear disc equation `g_ζ̄ = A(ζ,g)·conj(g_ζ) + b(ζ,g)` in one
/// chart, discretized on `V_N` with the chart map
/// `F(g) = g − Π T₀(A(g)·conj(g_ζ) + b(g)) − Σ_j Re(w_j, g) p_j`.
#[derive(Debug, Clone)]
pub struct DiscProblem {
    chart: StructureChart,
    options: SolverOptions,
    config: VekuaConfig,
    grid: DiscGrid,
    analyzer: std::sync::Arc<Analyzer>,
    basis: DiscBasis,
    /// Corrections entering `F`, from the linearization at the zero disc.
    modification: FredholmModification,
}

impl DiscProblem {
    pub fn new(chart: StructureChart, options: SolverOptions) -> Result<Self> {
        let config = VekuaConfig::with_degree(options.degree);
        let work = config.work_degree();
        let grid = DiscGrid::for_degree(work);
        let analyzer = std::sync::Arc::new(Analyzer::new(&grid, work)?);
        let basis = DiscBasis::new(options.degree);
        let mut problem = Self {
            chart,
            options,
            config,
            grid,
            analyzer,
            basis,
            modification: FredholmModification::empty(),
        };
        let zero = SpectralField::zeros(problem.n(), 0);
        let lin = problem.linearize(&zero)?;
        let op = DiscretizedOperator::assemble_with(&lin, problem.basis.clone(), options.centered)?;
        let (kernel, _) = kernel_basis(&op, config.svd_tol);
        if !kernel.is_empty() {
            let m = build_modification(&op, &kernel, default_eps(&op), config.svd_tol)?;
            // F carries −Σ Re(w_j,·)p_j, so F′(0) = P̃ needs the negated corrections
            problem.modification = m.negated();
        }
        Ok(problem)
    }

    pub fn chart(&self) -> &StructureChart {
        &self.chart
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    pub fn config(&self) -> &VekuaConfig {
        &self.config
    }

    pub fn grid(&self) -> &DiscGrid {
        &self.grid
    }

    pub fn basis(&self) -> &DiscBasis {
        &self.basis
    }

    pub fn modification(&self) -> &FredholmModification {
        &self.modification
    }

    pub fn n(&self) -> usize {
        self.chart.n()
    }

    pub fn degree(&self) -> usize {
        self.options.degree
    }

    /// Same discretization with `(A, b)` scaled by `t`.
    pub fn scaled(&self, t: f64) -> Self {
        Self {
            chart: self.chart.scaled(t),
            ..self.clone()
        }
    }

    pub fn with_method(&self, method: Method) -> Self {
        let mut p = self.clone();
        p.options.method = method;
        p
    }

    fn values(&self, g: &SpectralField) -> Result<(GridValues, GridValues)> {
        if g.ncomp() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "disc has {} components, chart has {}",
                g.ncomp(),
                self.n()
            )));
        }
        let gv = synthesize(g, &self.grid);
        let dv = synthesize(&complex_derivative(g, Derivative::Zeta), &self.grid);
        if !self.chart.is_independent_of_z() {
            for p in 0..self.grid.len() {
                self.chart.check_point(&gv.point_value(p))?;
            }
        }
        Ok((gv, dv))
    }

    /// `A(ζ,g)·conj(g_ζ) + b(ζ,g)` on the grid.
    fn nonlinear_values(&self, g: &SpectralField) -> Result<GridValues> {
        let n = self.n();
        let (gv, dv) = self.values(g)?;
        let mut out = GridValues::zeros(n, self.grid.len());
        for p in 0..self.grid.len() {
            let zeta = self.grid.point(p);
            let z = gv.point_value(p);
            let a = self.chart.a_at(zeta, &z);
            let b = self.chart.b_at(zeta, &z);
            for k in 0..n {
                let mut acc = b[k];
                for j in 0..n {
                    acc += a[(k, j)] * dv.at(j, p).conj();
                }
                out.comp_mut(k)[p] = acc;
            }
        }
        Ok(out)
    }

    /// `A(ζ,g)·conj(g_ζ) + b(ζ,g)` analyzed to the work degree.
    pub fn nonlinear_term(&self, g: &SpectralField) -> Result<SpectralField> {
        Ok(self.analyzer.analyze(&self.nonlinear_values(g)?))
    }

    /// `r = ∂_ζ̄g − A(g)·conj(∂_ζg) − b(g)`, evaluated pointwise on the grid
    /// and then analyzed.
    pub fn cr_residual(&self, g: &SpectralField) -> Result<CrResidual> {
        let nl = self.nonlinear_values(g)?;
        let dbar = synthesize(&complex_derivative(g, Derivative::ZetaBar), &self.grid);
        let mut r = dbar;
        for k in 0..self.n() {
            for p in 0..self.grid.len() {
                r.comp_mut(k)[p] -= nl.at(k, p);
            }
        }
        Ok(CrResidual {
            sup_norm: r.max_norm(),
            field: self.analyzer.analyze(&r),
        })
    }

    /// The chart map `F(g)`, projected onto `V_N`.
    pub fn forward_map(&self, g: &SpectralField) -> Result<SpectralField> {
        Ok(self.basis.from_real(self.n(), &self.forward_real(g)?))
    }

    /// Real coordinates of `F(g)`.
    pub(crate) fn forward_real(&self, g: &SpectralField) -> Result<DVector<f64>> {
        let centered = self.options.centered;
        let t = cauchy_green(&self.nonlinear_term(g)?, centered)?;
        let gx = self.basis.to_real(g, false);
        let mut out = &gx - self.basis.to_real(&t, centered);
        if !self.modification.is_empty() {
            out += self.modification.correction_matrix(&self.basis, self.n()) * &gx;
        }
        Ok(out)
    }

    /// Fixed-point map `g ↦ φ + Π T₀(A(g)conj(g_ζ) + b(g)) + Σ Re(w_j,g)p_j`.
    pub(crate) fn picard_real(&self, g: &SpectralField, target: &DVector<f64>) -> Result<DVector<f64>> {
        let gx = self.basis.to_real(g, false);
        Ok(target - (self.forward_real(g)? - gx))
    }

    /// Linearization of the disc equation at `g`:
    /// `B₁_kl = Σ_j ∂_{z_l}a_kj·conj(∂_ζg_j) + ∂_{z_l}b_k`, `B₂` likewise with
    /// `∂_{z̄_l}`, and `A_base = A(ζ, g)`.
    pub fn linearize(&self, g: &SpectralField) -> Result<LinearCRSystem> {
        let n = self.n();
        let (gv, dv) = self.values(g)?;
        let chart = &self.chart;
        let a_entries: Vec<&PolynomialMap> = (0..n * n).map(|i| chart.a_entry(i / n, i % n)).collect();
        let b_entries: Vec<&PolynomialMap> = (0..n).map(|k| chart.b_entry(k)).collect();

        let field_of = |f: &dyn Fn(usize) -> C64| -> SpectralField {
            let mut v = GridValues::zeros(1, self.grid.len());
            for p in 0..self.grid.len() {
                v.comp_mut(0)[p] = f(p);
            }
            self.analyzer.analyze(&v)
        };

        let mut b1 = vec![SpectralField::zeros(1, 0); n * n];
        let mut b2 = vec![SpectralField::zeros(1, 0); n * n];
        for (mat, var_of) in [
            (&mut b1, Var::Z as fn(usize) -> Var),
            (&mut b2, Var::ZBar as fn(usize) -> Var),
        ] {
            for k in 0..n {
                for l in 0..n {
                    let da: Vec<PolynomialMap> =
                        (0..n).map(|j| a_entries[k * n + j].partial(var_of(l))).collect();
                    let db = b_entries[k].partial(var_of(l));
                    if da.iter().all(|p| p.is_zero()) && db.is_zero() {
                        continue;
                    }
                    mat[k * n + l] = field_of(&|p| {
                        let zeta = self.grid.point(p);
                        let z = gv.point_value(p);
                        let mut acc = db.eval(zeta, &z);
                        for (j, d) in da.iter().enumerate() {
                            if !d.is_zero() {
                                acc += d.eval(zeta, &z) * dv.at(j, p).conj();
                            }
                        }
                        acc
                    });
                }
            }
        }
        let mut a_base = vec![SpectralField::zeros(1, 0); n * n];
        for (i, a) in a_entries.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            a_base[i] = if a.is_constant() {
                SpectralField::constant(a.eval(C64::new(0.0, 0.0), &vec![C64::new(0.0, 0.0); n]))
            } else {
                field_of(&|p| a.eval(self.grid.point(p), &gv.point_value(p)))
            };
        }
        LinearCRSystem::new(n, b1, b2)?.with_a_base(a_base)
    }

    /// Real matrix of `F′(g)` on `V_N`.
    pub fn derivative_matrix(&self, g: &SpectralField) -> Result<DMatrix<f64>> {
        let lin = self.linearize(g)?;
        let op = DiscretizedOperator::assemble_with(&lin, self.basis.clone(), self.options.centered)?;
        Ok(op.modified(&self.modification).matrix().clone())
    }

    /// `F′(g)u`, projected onto `V_N`.
    pub fn derivative_apply(&self, g: &SpectralField, u: &SpectralField) -> Result<SpectralField> {
        let m = self.derivative_matrix(g)?;
        Ok(self.basis.from_real(self.n(), &(m * self.basis.to_real(u, false))))
    }

    /// Largest spectral norm of `A(ζ, g(ζ))` over the grid; the disc equation
    /// is elliptic while this stays below one.
    pub fn max_structure_norm(&self, g: &SpectralField) -> Result<f64> {
        let (gv, _) = self.values(g)?;
        let mut worst: f64 = 0.0;
        for p in 0..self.grid.len() {
            let a = self.chart.a_at(self.grid.point(p), &gv.point_value(p));
            let s = a.svd(false, false).singular_values.max();
            worst = worst.max(s);
        }
        Ok(worst)
    }

    pub fn datum_real(&self, phi: &HolomorphicDatum) -> DVector<f64> {
        self.basis.to_real(&phi.to_field(), false)
    }
}
