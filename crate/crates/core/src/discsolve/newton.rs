use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::cgreen::{HolomorphicDatum, SpectralField};
use crate::error::{Error, Result};

use super::problem::{DiscProblem, Method};

/// Continuation parameters used by [`Method::Continuation`].
pub const CONTINUATION_STEPS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

const DIVERGENCE_LIMIT: f64 = 1e8;

/// A disc satisfying `F(g) = target` to the requested tolerance.
#[derive(Debug, Clone)]
pub struct DiscSolution {
    pub g: SpectralField,
    /// Right-hand side of `F(g) = target`, a field in `V_N`.
    pub target: SpectralField,
    pub method: Method,
    pub iterations: usize,
    /// `‖F(g) − target‖` after each iteration (initial guess first).
    pub residual_log: Vec<f64>,
    pub map_residual: f64,
    /// Sup over the grid of `|g_ζ̄ − A(g)conj(g_ζ) − b(g)|`.
    pub cr_residual: f64,
    /// Largest `‖A(ζ, g(ζ))‖` seen on the grid.
    pub max_structure_norm: f64,
}

/// JSON-friendly summary of a [`DiscSolution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSummary {
    pub method: Method,
    pub iterations: usize,
    pub residual_log: Vec<f64>,
    pub map_residual: f64,
    pub cr_residual: f64,
    pub max_structure_norm: f64,
    pub center_value: Vec<[f64; 2]>,
}

impl DiscSolution {
    pub fn summary(&self) -> SolutionSummary {
        SolutionSummary {
            method: self.method,
            iterations: self.iterations,
            residual_log: self.residual_log.clone(),
            map_residual: self.map_residual,
            cr_residual: self.cr_residual,
            max_structure_norm: self.max_structure_norm,
            center_value: self.g.value_at_zero().iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

fn converged(res: f64, tol: f64, target_norm: f64) -> bool {
    res <= tol * target_norm.max(1.0)
}

fn no_convergence(iterations: usize, log: Vec<f64>) -> Error {
    Error::NoConvergence {
        iterations,
        residual: log.last().copied().unwrap_or(f64::NAN),
        log,
    }
}

fn newton(problem: &DiscProblem, target: &DVector<f64>, init: DVector<f64>) -> Result<(DVector<f64>, Vec<f64>)> {
    let n = problem.n();
    let basis = problem.basis();
    let tol = problem.options().tol;
    let tnorm = target.norm();
    let mut x = init;
    let mut log = Vec::new();
    for it in 0..=problem.options().max_iter {
        let g = basis.from_real(n, &x);
        let r = problem.forward_real(&g)? - target;
        let rn = r.norm();
        log.push(rn);
        if !rn.is_finite() || rn > DIVERGENCE_LIMIT {
            return Err(no_convergence(it, log));
        }
        if converged(rn, tol, tnorm) {
            return Ok((x, log));
        }
        if it == problem.options().max_iter {
            break;
        }
        let jac = problem.derivative_matrix(&g)?;
        let step = jac.lu().solve(&r).ok_or(Error::IllConditioned {
            condition: f64::INFINITY,
            limit: problem.config().cond_limit,
        })?;
        if step.iter().any(|v| !v.is_finite()) {
            return Err(Error::IllConditioned {
                condition: f64::INFINITY,
                limit: problem.config().cond_limit,
            });
        }
        x -= step;
    }
    let iters = log.len() - 1;
    Err(no_convergence(iters, log))
}

fn picard(problem: &DiscProblem, target: &DVector<f64>, init: DVector<f64>) -> Result<(DVector<f64>, Vec<f64>)> {
    let n = problem.n();
    let basis = problem.basis();
    let tol = problem.options().tol;
    let tnorm = target.norm();
    let mut x = init;
    let mut log = Vec::new();
    for it in 0..=problem.options().max_iter {
        let g = basis.from_real(n, &x);
        let next = problem.picard_real(&g, target)?;
        // x − next = F(x) − target
        let rn = (&x - &next).norm();
        log.push(rn);
        if !rn.is_finite() || rn > DIVERGENCE_LIMIT {
            return Err(no_convergence(it, log));
        }
        if converged(rn, tol, tnorm) {
            return Ok((x, log));
        }
        x = next;
    }
    let iters = log.len() - 1;
    Err(no_convergence(iters, log))
}

fn finish(
    problem: &DiscProblem,
    target: &SpectralField,
    init: &SpectralField,
    x: &DVector<f64>,
    method: Method,
    log: Vec<f64>,
) -> Result<DiscSolution> {
    // an accepted initial guess is returned as given, without a basis round trip
    let g = if log.len() == 1 {
        init.clone()
    } else {
        problem.basis().from_real(problem.n(), x)
    };
    let cr = problem.cr_residual(&g)?;
    Ok(DiscSolution {
        max_structure_norm: problem.max_structure_norm(&g)?,
        iterations: log.len() - 1,
        map_residual: *log.last().expect("nonempty log"),
        residual_log: log,
        cr_residual: cr.sup_norm,
        target: target.clone(),
        method,
        g,
    })
}

/// Solves `F(g) = target` for a target field in `V_N`, starting from `init`
/// (the target itself if `None`).
pub fn solve_disc_target(
    problem: &DiscProblem,
    target: &SpectralField,
    init: Option<&SpectralField>,
) -> Result<DiscSolution> {
    let basis = problem.basis();
    let tx = basis.to_real(target, false);
    let init = init.unwrap_or(target);
    let x0 = basis.to_real(init, false);
    let method = problem.options().method;
    match method {
        Method::Newton => {
            let (x, log) = newton(problem, &tx, x0)?;
            finish(problem, target, init, &x, method, log)
        }
        Method::Picard => {
            let (x, log) = picard(problem, &tx, x0)?;
            finish(problem, target, init, &x, method, log)
        }
        Method::Continuation => {
            let mut x = x0;
            let mut log = Vec::new();
            for &t in &CONTINUATION_STEPS {
                let stage = problem.scaled(t);
                let (xt, lt) = newton(&stage, &tx, x)?;
                x = xt;
                log.extend(lt);
            }
            finish(problem, target, init, &x, method, log)
        }
    }
}

/// Solves `F(g) = φ` for a holomorphic datum.
pub fn solve_disc(problem: &DiscProblem, phi: &HolomorphicDatum) -> Result<DiscSolution> {
    if phi.n() != problem.n() {
        return Err(Error::DimensionMismatch(format!(
            "datum has {} components, chart has {}",
            phi.n(),
            problem.n()
        )));
    }
    solve_disc_target(problem, &phi.to_field(), None)
}

/// Discs `g_t = F⁻¹(F(base) + tψ)` along a parameter list, each warm-started from
/// the previous one. Stops at the first failure.
#[derive(Debug, Clone)]
pub struct DeformFamily {
    pub params: Vec<f64>,
    pub members: Vec<DiscSolution>,
    /// Parameter and error at which the family was truncated.
    pub failure: Option<(f64, Error)>,
}

pub fn deform_family(
    problem: &DiscProblem,
    base: &DiscSolution,
    psi: &HolomorphicDatum,
    params: &[f64],
) -> Result<DeformFamily> {
    if psi.n() != problem.n() {
        return Err(Error::DimensionMismatch(format!(
            "direction has {} components, chart has {}",
            psi.n(),
            problem.n()
        )));
    }
    let dir = psi.to_field();
    let mut members: Vec<DiscSolution> = Vec::new();
    let mut done = Vec::new();
    let mut failure = None;
    for &t in params {
        let target = &base.target + &dir.scale(num_complex::Complex64::new(t, 0.0));
        let init = members.last().map_or(&base.g, |m| &m.g).clone();
        match solve_disc_target(problem, &target, Some(&init)) {
            Ok(sol) => {
                done.push(t);
                members.push(sol);
            }
            Err(e) => {
                failure = Some((t, e));
                break;
            }
        }
    }
    Ok(DeformFamily {
        params: done,
        members,
        failure,
    })
}
