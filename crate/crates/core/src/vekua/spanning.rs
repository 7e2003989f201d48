use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::cgreen::{DiscGrid, HolomorphicDatum, SpectralField};
use crate::error::{Error, Result};

use super::modification::FredholmModification;
use super::solve::{jet_eval, JetSolver, JetVector, LinearSolver, VekuaConfig};
use super::system::LinearCRSystem;

/// Below this the family is extended with the next sample point.
const SPAN_TARGET: f64 = 1e-2;
/// Below this after all sample points the family is declared non-surjective.
pub const SPAN_FLOOR: f64 = 1e-6;

/// Solutions whose `k`-jets span `(ℂⁿ)^{k+1}` over ℝ at every checked point.
#[derive(Debug, Clone)]
pub struct SpanningFamily {
    pub members: Vec<SpectralField>,
    pub order: usize,
    /// Sample points whose jet prescriptions were used.
    pub used_points: Vec<C64>,
    pub min_sigma: f64,
    pub worst_point: C64,
}

/// Center plus seven points on the circle of radius 0.7.
pub fn default_sample_points() -> Vec<C64> {
    let mut pts = vec![C64::new(0.0, 0.0)];
    pts.extend((0..7).map(|j| C64::from_polar(0.7, 2.0 * std::f64::consts::PI * j as f64 / 7.0)));
    pts
}

/// Points at which surjectivity is checked: a polar grid, the origin and the
/// boundary circle.
pub fn check_points() -> Vec<C64> {
    let grid = DiscGrid::new(12, 24);
    let mut pts: Vec<C64> = grid.points().collect();
    pts.push(C64::new(0.0, 0.0));
    pts.extend((0..24).map(|j| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / 24.0)));
    pts
}

fn jet_column(jet: &JetVector) -> Vec<f64> {
    jet.values.iter().flatten().flat_map(|c| [c[0], c[1]]).collect()
}

/// Real `2n(k+1) × |V|` matrix of the jet evaluation on `span_ℝ V`.
pub fn jet_matrix(members: &[SpectralField], zeta: C64, k: usize) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = members
        .iter()
        .map(|u| DVector::from_vec(jet_column(&jet_eval(u, zeta, k))))
        .collect();
    DMatrix::from_columns(&cols)
}

/// Smallest of the first `2n(k+1)` singular values of the jet matrix; zero if
/// the family is too small to be surjective.
pub fn jet_sigma_min(members: &[SpectralField], zeta: C64, k: usize) -> f64 {
    if members.is_empty() {
        return 0.0;
    }
    let m = jet_matrix(members, zeta, k);
    if m.ncols() < m.nrows() {
        return 0.0;
    }
    let rows = m.nrows();
    let mut s: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s[rows - 1]
}

fn worst(members: &[SpectralField], k: usize, points: &[C64]) -> (f64, C64) {
    points
        .iter()
        .map(|&z| (jet_sigma_min(members, z, k), z))
        .fold((f64::INFINITY, C64::new(0.0, 0.0)), |a, b| if b.0 < a.0 { b } else { a })
}

/// Real unit jets at a point, `2n(k+1)` of them.
fn unit_jets(n: usize, k: usize, zeta: C64) -> Vec<JetVector> {
    let mut out = Vec::new();
    for j in 0..=k {
        for c in 0..n {
            for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                let mut values = vec![vec![C64::new(0.0, 0.0); n]; k + 1];
                values[j][c] = unit;
                out.push(JetVector::new(zeta, values));
            }
        }
    }
    out
}

/// Minimum-norm combinations of `candidates` taking each real unit jet at `zeta`.
fn prescribe_by_least_squares(candidates: &[SpectralField], n: usize, k: usize, zeta: C64) -> Vec<SpectralField> {
    let jm = jet_matrix(candidates, zeta, k);
    let pinv = match jm.clone().svd(true, true).pseudo_inverse(1e-12) {
        Ok(p) => p,
        Err(_) => return Vec::new(),
    };
    unit_jets(n, k, zeta)
        .iter()
        .map(|t| {
            let x = &pinv * DVector::from_vec(jet_column(t));
            let mut u = SpectralField::zeros(n, 0);
            for (coef, cand) in x.iter().zip(candidates) {
                u = &u + &cand.scale(C64::new(*coef, 0.0));
            }
            u
        })
        .collect()
}

/// Builds a spanning family for `k`-jets. At the origin each real unit jet is
/// prescribed exactly (when the system has no Beltrami term); at the other
/// sample points unit jets are matched by least squares over solutions with
/// monomial data `e_c ζᵐ`, `m ≤ k + 4`. Sample points are added until the jet
/// matrix is well conditioned at every check point.
pub fn spanning_family(
    sys: &LinearCRSystem,
    modification: Option<&FredholmModification>,
    k: usize,
    sample_points: &[C64],
    config: &VekuaConfig,
) -> Result<SpanningFamily> {
    let n = sys.n();
    let solver = match modification {
        Some(m) => LinearSolver::with_modification(sys, m, config)?,
        None => LinearSolver::new(sys, config)?,
    };
    let mut candidates = Vec::new();
    for m in 0..=k + 4 {
        for c in 0..n {
            for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                let mut taylor = vec![vec![C64::new(0.0, 0.0); n]; m + 1];
                taylor[m][c] = unit;
                candidates.push(solver.solve_holomorphic(&HolomorphicDatum::new(taylor))?);
            }
        }
    }
    let checks = check_points();
    let mut members: Vec<SpectralField> = Vec::new();
    let mut used = Vec::new();
    let mut state = (0.0, C64::new(0.0, 0.0));
    for &zeta in sample_points {
        let new = if zeta == C64::new(0.0, 0.0) && !sys.has_a_base() && k <= config.k_max {
            let jets = JetSolver::new(sys, Some(solver.modification()), k, config)?;
            unit_jets(n, k, zeta)
                .iter()
                .map(|t| jets.solve(t))
                .collect::<Result<Vec<_>>>()?
        } else {
            prescribe_by_least_squares(&candidates, n, k, zeta)
        };
        members.extend(new);
        used.push(zeta);
        state = worst(&members, k, &checks);
        if state.0 >= SPAN_TARGET {
            break;
        }
    }
    if state.0 < SPAN_FLOOR {
        return Err(Error::SurjectivityFailed {
            zeta_re: state.1.re,
            zeta_im: state.1.im,
            sigma_min: state.0,
        });
    }
    Ok(SpanningFamily {
        members,
        order: k,
        used_points: used,
        min_sigma: state.0,
        worst_point: state.1,
    })
}
