use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cgreen::SpectralField;
use crate::error::{Error, Result};
use crate::vekua::{default_sample_points, spanning_family, SpanningFamily};

use super::jets::immersion_margin;
use super::newton::{solve_disc_target, DiscSolution};
use super::problem::DiscProblem;
use super::transversality::{transversality_report, JetSubmanifold, TransversalityReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbOptions {
    /// Radius of the ball the parameter `s` is drawn from.
    pub eps_max: f64,
    pub seed: u64,
    pub max_draws: usize,
    /// Number of steps of the homotopy `t ↦ g_{ts}`.
    pub homotopy_steps: usize,
}

impl Default for PerturbOptions {
    fn default() -> Self {
        Self {
            eps_max: 0.05,
            seed: 0,
            max_draws: 16,
            homotopy_steps: 8,
        }
    }
}

/// A perturbed disc `g_s = F⁻¹(F(g) + Σ s_l F′(g)u_l)` and its homotopy to `g`.
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub disc: DiscSolution,
    pub s: Vec<f64>,
    pub s_norm: f64,
    /// Number of random draws used; zero if `g` already qualified.
    pub attempts: usize,
    /// `g_{t_j s}` for `t_j = j/steps`, starting at the base disc.
    pub homotopy: Vec<DiscSolution>,
    /// Sup over the grid of `|g_s − g|`.
    pub distance_sup: f64,
    pub distance_l2: f64,
    /// `‖F′(g)⁻¹‖·‖[F′(g)u_l]‖`, so `‖g_s − g‖ ≤ κ‖s‖` to first order.
    pub kappa: f64,
    /// Value of the acceptance score at `g_s`.
    pub score: f64,
}

/// Serializable summary of a [`Perturbation`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSummary {
    pub s: Vec<f64>,
    pub s_norm: f64,
    pub attempts: usize,
    pub homotopy_steps: usize,
    pub homotopy_max_residual: f64,
    pub distance_sup: f64,
    pub distance_l2: f64,
    pub kappa: f64,
    pub score: f64,
}

impl Perturbation {
    pub fn summary(&self) -> PerturbationSummary {
        PerturbationSummary {
            s: self.s.clone(),
            s_norm: self.s_norm,
            attempts: self.attempts,
            homotopy_steps: self.homotopy.len().saturating_sub(1),
            homotopy_max_residual: self
                .homotopy
                .iter()
                .map(|h| h.cr_residual)
                .fold(0.0, f64::max),
            distance_sup: self.distance_sup,
            distance_l2: self.distance_l2,
            kappa: self.kappa,
            score: self.score,
        }
    }
}

/// Spanning family of `k`-jets for the linearization at `g`.
pub fn spanning_family_at(problem: &DiscProblem, g: &SpectralField, k: usize) -> Result<SpanningFamily> {
    let lin = problem.linearize(g)?;
    spanning_family(&lin, None, k, &default_sample_points(), problem.config())
}

fn draw(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
            return v.into_iter().map(|x| x * r / norm).collect();
        }
    }
}

/// Draws `s` until `accept(g_s)` holds, then builds the homotopy.
fn perturb(
    problem: &DiscProblem,
    base: &DiscSolution,
    family: &SpanningFamily,
    opts: &PerturbOptions,
    score: &dyn Fn(&SpectralField) -> Result<(bool, f64)>,
) -> Result<Perturbation> {
    let n = problem.n();
    let basis = problem.basis();
    let (ok, sc) = score(&base.g)?;
    if ok {
        return Ok(Perturbation {
            disc: base.clone(),
            s: vec![0.0; family.members.len()],
            s_norm: 0.0,
            attempts: 0,
            homotopy: vec![base.clone()],
            distance_sup: 0.0,
            distance_l2: 0.0,
            kappa: 0.0,
            score: sc,
        });
    }
    if family.members.is_empty() {
        return Err(Error::PerturbationFailed { attempts: 0, best: sc });
    }
    let jac = problem.derivative_matrix(&base.g)?;
    let cols: Vec<DVector<f64>> = family
        .members
        .iter()
        .map(|u| &jac * basis.to_real(u, false))
        .collect();
    let phi = DMatrix::from_columns(&cols);
    let sv = jac.svd(false, false).singular_values;
    let kappa = phi.clone().svd(false, false).singular_values.max() / sv.min();

    let tx = basis.to_real(&base.target, false);
    let target_of = |s: &[f64], t: f64| -> SpectralField {
        let x = &tx + &phi * DVector::from_iterator(s.len(), s.iter().map(|v| v * t));
        basis.from_real(n, &x)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = sc;
    for attempt in 1..=opts.max_draws {
        let s = draw(&mut rng, family.members.len(), opts.eps_max);
        let Ok(disc) = solve_disc_target(problem, &target_of(&s, 1.0), Some(&base.g)) else {
            continue;
        };
        let (ok, sc) = score(&disc.g)?;
        best = if best.is_nan() { sc } else { best.max(sc) };
        if !ok {
            continue;
        }
        let mut homotopy = vec![base.clone()];
        for j in 1..=opts.homotopy_steps {
            let t = j as f64 / opts.homotopy_steps as f64;
            let prev = homotopy.last().expect("nonempty").g.clone();
            homotopy.push(solve_disc_target(problem, &target_of(&s, t), Some(&prev))?);
        }
        let diff = &disc.g - &base.g;
        return Ok(Perturbation {
            s_norm: s.iter().map(|x| x * x).sum::<f64>().sqrt(),
            s,
            attempts: attempt,
            homotopy,
            distance_sup: diff.sup_on(problem.grid()),
            distance_l2: diff.l2_norm(),
            kappa,
            score: sc,
            disc,
        });
    }
    Err(Error::PerturbationFailed {
        attempts: opts.max_draws,
        best,
    })
}

/// Perturbs `base` within the family until `g_s` is an immersion with
/// `min |∂_ζ g_s| > delta`.
pub fn whitney_perturb(
    problem: &DiscProblem,
    base: &DiscSolution,
    family: &SpanningFamily,
    delta: f64,
    opts: &PerturbOptions,
) -> Result<Perturbation> {
    let grid = problem.grid().clone();
    perturb(problem, base, family, opts, &|g| {
        let m = immersion_margin(g, &grid).margin;
        Ok((m > delta, m))
    })
}

/// Perturbs `base` until `j^k g_s` is transverse to `sub`.
pub fn transversality_perturb(
    problem: &DiscProblem,
    base: &DiscSolution,
    family: &SpanningFamily,
    sub: &JetSubmanifold,
    opts: &PerturbOptions,
) -> Result<(Perturbation, TransversalityReport)> {
    let p = perturb(problem, base, family, opts, &|g| {
        let r = transversality_report(g, sub)?;
        Ok((r.transverse, r.margin))
    })?;
    let report = transversality_report(&p.disc.g, sub)?;
    Ok((p, report))
}

/// Discs `F⁻¹(F(g) + Σ s_l F′(g)u_l)` as a function of `s`, for callers
/// that want to probe the family directly.
pub fn family_disc(
    problem: &DiscProblem,
    base: &DiscSolution,
    family: &SpanningFamily,
    s: &[f64],
) -> Result<DiscSolution> {
    if s.len() != family.members.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} parameters for a family of {}",
            s.len(),
            family.members.len()
        )));
    }
    let basis = problem.basis();
    let jac = problem.derivative_matrix(&base.g)?;
    let mut x = basis.to_real(&base.target, false);
    for (u, &sl) in family.members.iter().zip(s) {
        x += (&jac * basis.to_real(u, false)) * sl;
    }
    let target = basis.from_real(problem.n(), &x);
    solve_disc_target(problem, &target, Some(&base.g))
}
