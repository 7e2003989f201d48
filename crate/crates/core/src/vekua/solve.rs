use nalgebra::{DVector, Dyn, LU};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cgreen::{
    analyze, cauchy_green, synthesize, zeta_derivative_n, DiscGrid, GridValues,
    HolomorphicDatum, SpectralField,
};
use crate::error::{Error, Result};

use super::discrete::{kernel_basis, DiscretizedOperator};
use super::modification::{build_modification, default_eps, FredholmModification};
use super::system::LinearCRSystem;

/// Numerical parameters of the linear theory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VekuaConfig {
    /// Degree budget `N` of the solution space.
    pub degree: usize,
    /// Highest jet order handled by [`solve_with_jet`].
    pub k_max: usize,
    /// Kernel threshold relative to the largest singular value.
    pub svd_tol: f64,
    /// Correction size; `None` means `1e−3·‖P‖`.
    pub eps: Option<f64>,
    /// Largest acceptable condition number of `P̃`.
    pub cond_limit: f64,
}

impl Default for VekuaConfig {
    fn default() -> Self {
        Self {
            degree: 16,
            k_max: 3,
            svd_tol: 1e-6,
            eps: None,
            cond_limit: 1e10,
        }
    }
}

impl VekuaConfig {
    pub fn with_degree(degree: usize) -> Self {
        Self {
            degree,
            ..Self::default()
        }
    }

    /// `N + k_max + 2`, the budget for intermediate fields.
    pub fn work_degree(&self) -> usize {
        self.degree + self.k_max + 2
    }
}

/// Condition number, residual and center value of one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub condition_number: f64,
    pub residual_norm: f64,
    pub center_value: Vec<[f64; 2]>,
}

/// LU factorization of the discretized `P̃` for repeated solves.
#[derive(Debug, Clone)]
pub struct LinearSolver {
    system: LinearCRSystem,
    operator: DiscretizedOperator,
    modification: FredholmModification,
    singular_values: DVector<f64>,
    lu: LU<f64, Dyn, Dyn>,
}

impl LinearSolver {
    /// Detects the kernel of `P`, builds the modification and factors `P̃`.
    pub fn new(sys: &LinearCRSystem, config: &VekuaConfig) -> Result<Self> {
        let op = DiscretizedOperator::assemble(sys, config.degree)?;
        let (kernel, _) = kernel_basis(&op, config.svd_tol);
        let modification = if kernel.is_empty() {
            FredholmModification::empty()
        } else {
            let eps = config.eps.unwrap_or_else(|| default_eps(&op));
            build_modification(&op, &kernel, eps, config.svd_tol)?
        };
        Self::from_operator(sys, op, modification, config)
    }

    /// Uses a given modification instead of detecting one.
    pub fn with_modification(
        sys: &LinearCRSystem,
        modification: &FredholmModification,
        config: &VekuaConfig,
    ) -> Result<Self> {
        let op = DiscretizedOperator::assemble(sys, config.degree)?;
        Self::from_operator(sys, op, modification.clone(), config)
    }

    /// Factors an already assembled (possibly modified) operator.
    pub fn from_operator(
        sys: &LinearCRSystem,
        op: DiscretizedOperator,
        modification: FredholmModification,
        config: &VekuaConfig,
    ) -> Result<Self> {
        let operator = if modification.is_empty() || op.is_modified() {
            op
        } else {
            op.modified(&modification)
        };
        let singular_values = operator.singular_values();
        let cond = singular_values.max() / singular_values.min();
        if !cond.is_finite() || cond > config.cond_limit {
            return Err(Error::IllConditioned {
                condition: cond,
                limit: config.cond_limit,
            });
        }
        let lu = operator.matrix().clone().lu();
        Ok(Self {
            system: sys.clone(),
            operator,
            modification,
            singular_values,
            lu,
        })
    }

    pub fn system(&self) -> &LinearCRSystem {
        &self.system
    }

    pub fn operator(&self) -> &DiscretizedOperator {
        &self.operator
    }

    pub fn modification(&self) -> &FredholmModification {
        &self.modification
    }

    pub fn singular_values(&self) -> &DVector<f64> {
        &self.singular_values
    }

    pub fn condition_number(&self) -> f64 {
        self.singular_values.max() / self.singular_values.min()
    }

    /// Solves `P̃u = f` for `f` projected onto `V_N`.
    pub fn solve_projected(&self, f: &SpectralField) -> SpectralField {
        let x = self
            .lu
            .solve(&self.operator.to_real(f))
            .expect("factorization checked for conditioning");
        self.operator.from_real(&x)
    }

    /// Generalized holomorphic vector with `P̃u = φ`; `u(0) = φ(0)`.
    pub fn solve_holomorphic(&self, phi: &HolomorphicDatum) -> Result<SpectralField> {
        self.check_n(phi.n())?;
        Ok(self.solve_projected(&phi.to_field()))
    }

    /// Solution of `u_ζ̄ = B₁u + B₂ū + ψ` via `P̃u = Tψ`.
    pub fn solve_nonhomogeneous(&self, psi: &SpectralField) -> Result<SpectralField> {
        self.check_n(psi.ncomp())?;
        Ok(self.solve_projected(&cauchy_green(psi, false)?))
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n != self.system.n() {
            return Err(Error::DimensionMismatch(format!(
                "datum has {n} components, system has {}",
                self.system.n()
            )));
        }
        Ok(())
    }

    pub fn report(&self, u: &SpectralField, psi: Option<&SpectralField>) -> SolverReport {
        SolverReport {
            condition_number: self.condition_number(),
            residual_norm: self.system.residual(u, psi).l2_norm(),
            center_value: u.value_at_zero().iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

/// Right-hand side of [`solve_linear`].
#[derive(Debug, Clone, Copy)]
pub enum LinearRhs<'a> {
    Holomorphic(&'a HolomorphicDatum),
    NonHomogeneous(&'a SpectralField),
}

/// One-shot solve; `modification = None` detects the kernel first.
pub fn solve_linear(
    sys: &LinearCRSystem,
    modification: Option<&FredholmModification>,
    rhs: LinearRhs<'_>,
    config: &VekuaConfig,
) -> Result<SpectralField> {
    let solver = match modification {
        Some(m) => LinearSolver::with_modification(sys, m, config)?,
        None => LinearSolver::new(sys, config)?,
    };
    match rhs {
        LinearRhs::Holomorphic(phi) => solver.solve_holomorphic(phi),
        LinearRhs::NonHomogeneous(psi) => solver.solve_nonhomogeneous(psi),
    }
}

/// `(u(ζ₀), ∂_ζu(ζ₀), …, ∂_ζᵏu(ζ₀))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetVector {
    pub base: [f64; 2],
    pub values: Vec<Vec<[f64; 2]>>,
}

impl JetVector {
    pub fn new(base: C64, values: Vec<Vec<C64>>) -> Self {
        assert!(!values.is_empty());
        Self {
            base: [base.re, base.im],
            values: values
                .into_iter()
                .map(|v| v.into_iter().map(|c| [c.re, c.im]).collect())
                .collect(),
        }
    }

    pub fn base_point(&self) -> C64 {
        C64::new(self.base[0], self.base[1])
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn n(&self) -> usize {
        self.values[0].len()
    }

    pub fn value(&self, j: usize) -> Vec<C64> {
        self.values[j].iter().map(|c| C64::new(c[0], c[1])).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().flatten().flatten().all(|x| x.is_finite())
    }

    /// Euclidean distance over all entries.
    pub fn distance(&self, other: &JetVector) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().flatten().map(|a| a[0] * a[0] + a[1] * a[1]).sum::<f64>().sqrt()
    }
}

/// Holomorphic `k`-jet of `u` at `ζ₀` by exact differentiation.
pub fn jet_eval(u: &SpectralField, zeta0: C64, k: usize) -> JetVector {
    let mut values = Vec::with_capacity(k + 1);
    let mut d = u.clone();
    for j in 0..=k {
        if j > 0 {
            d = zeta_derivative_n(&d, 1);
        }
        values.push(d.eval(zeta0));
    }
    JetVector::new(zeta0, values)
}

/// `B₂·e^{−2ikθ}` entrywise: applied on an angularly doubled grid (which
/// excludes the origin) and re-analyzed to `degree`.
pub fn twisted_b2(sys: &LinearCRSystem, k: usize, degree: usize) -> Result<Vec<SpectralField>> {
    let grid = DiscGrid::for_degree(degree).refined_angular(2);
    sys.b2()
        .iter()
        .map(|b| {
            if b.max_abs_coeff() == 0.0 {
                return Ok(b.clone());
            }
            let vals = synthesize(b, &grid);
            let mut tw = GridValues::zeros(1, grid.len());
            for p in 0..grid.len() {
                let z = grid.point(p);
                let phase = (z.conj() / z).powu(k as u32);
                tw.comp_mut(0)[p] = vals.at(0, p) * phase;
            }
            analyze(&tw, &grid, degree)
        })
        .collect()
}

/// Prescribes holomorphic jets at the origin by the induction
/// `u ← u + ζʲ v_j`, where `v_j` solves the system with `B₂` twisted by
/// `e^{−2ijθ}` and `v_j(0) = (a_j − ∂_ζʲu(0))/j!`. Holds one factored
/// operator per induction step.
#[derive(Debug, Clone)]
pub struct JetSolver {
    base: LinearSolver,
    twisted: Vec<LinearSolver>,
}

impl JetSolver {
    pub fn new(
        sys: &LinearCRSystem,
        modification: Option<&FredholmModification>,
        k: usize,
        config: &VekuaConfig,
    ) -> Result<Self> {
        if sys.has_a_base() {
            return Err(Error::ModeMismatch(
                "jet prescription needs a system without a Beltrami term".into(),
            ));
        }
        if k > config.k_max {
            return Err(Error::DegreeOverflow {
                degree: k,
                limit: config.k_max,
            });
        }
        let base = match modification {
            Some(m) => LinearSolver::with_modification(sys, m, config)?,
            None => LinearSolver::new(sys, config)?,
        };
        let twisted = (1..=k)
            .map(|j| {
                let tw = sys.with_b2(twisted_b2(sys, j, config.work_degree())?)?;
                LinearSolver::new(&tw, config)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { base, twisted })
    }

    pub fn order(&self) -> usize {
        self.twisted.len()
    }

    pub fn base(&self) -> &LinearSolver {
        &self.base
    }

    pub fn solve(&self, target: &JetVector) -> Result<SpectralField> {
        let n = self.base.system().n();
        if target.base_point() != C64::new(0.0, 0.0) {
            return Err(Error::ModeMismatch("jet prescription is at the origin only".into()));
        }
        if target.n() != n {
            return Err(Error::DimensionMismatch(format!(
                "jet has {} components, system has {n}",
                target.n()
            )));
        }
        let k = target.order();
        if k > self.order() {
            return Err(Error::DegreeOverflow {
                degree: k,
                limit: self.order(),
            });
        }
        let mut u = self.base.solve_holomorphic(&HolomorphicDatum::constant(&target.value(0)))?;
        let mut factorial = 1.0;
        for j in 1..=k {
            factorial *= j as f64;
            let want = target.value(j);
            let v0: Vec<C64> = (0..n)
                .map(|c| (want[c] - u.get(c, j, 0) * factorial) / factorial)
                .collect();
            if v0.iter().all(|c| c.norm() == 0.0) {
                continue;
            }
            let v = self.twisted[j - 1].solve_holomorphic(&HolomorphicDatum::constant(&v0))?;
            u = &u + &v.shift_zeta(j);
        }
        Ok(u)
    }
}

/// One-shot jet prescription at the origin; see [`JetSolver`].
pub fn solve_with_jet(
    sys: &LinearCRSystem,
    modification: Option<&FredholmModification>,
    target: &JetVector,
    config: &VekuaConfig,
) -> Result<SpectralField> {
    JetSolver::new(sys, modification, target.order(), config)?.solve(target)
}
