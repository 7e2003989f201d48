use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cgreen::{complex_derivative, zeta_derivative_n, Derivative, DiscGrid, SpectralField};

/// `k`-jet of a disc at one point: `jets[j] = ∂_ζʲ g(ζ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetPoint {
    pub zeta: C64,
    pub jets: Vec<Vec<C64>>,
}

impl JetPoint {
    /// Jet coordinates flattened as `(z⁽⁰⁾, …, z⁽ᵏ⁾)`.
    pub fn flat(&self) -> Vec<C64> {
        self.jets.iter().flatten().copied().collect()
    }
}

/// Precomputed `∂_ζʲ g` for `j ≤ k` for repeated jet evaluation.
#[derive(Debug, Clone)]
pub struct JetExtension {
    derivs: Vec<SpectralField>,
}

impl JetExtension {
    pub fn new(g: &SpectralField, k: usize) -> Self {
        Self {
            derivs: (0..=k).map(|j| zeta_derivative_n(g, j)).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn at(&self, zeta: C64) -> JetPoint {
        JetPoint {
            zeta,
            jets: self.derivs.iter().map(|d| d.eval(zeta)).collect(),
        }
    }

    pub fn derivatives(&self) -> &[SpectralField] {
        &self.derivs
    }
}

/// `j^k g` at each of `points`.
pub fn jet_extension(g: &SpectralField, k: usize, points: &[C64]) -> Vec<JetPoint> {
    let ext = JetExtension::new(g, k);
    points.iter().map(|&z| ext.at(z)).collect()
}

/// Real `2n × 2` differential `[∂_x g, ∂_y g]` at `zeta`.
pub fn real_differential(g: &SpectralField, zeta: C64) -> DMatrix<f64> {
    let d = complex_derivative(g, Derivative::Zeta).eval(zeta);
    let db = complex_derivative(g, Derivative::ZetaBar).eval(zeta);
    let n = g.ncomp();
    let i = C64::new(0.0, 1.0);
    let mut m = DMatrix::zeros(2 * n, 2);
    for c in 0..n {
        let dx = d[c] + db[c];
        let dy = i * (d[c] - db[c]);
        m[(2 * c, 0)] = dx.re;
        m[(2 * c + 1, 0)] = dx.im;
        m[(2 * c, 1)] = dy.re;
        m[(2 * c + 1, 1)] = dy.im;
    }
    m
}

/// Smallest `|∂_ζ g|` on the closed unit disc and where it is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImmersionMargin {
    pub margin: f64,
    pub at: [f64; 2],
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn clamp_disc(z: C64) -> C64 {
    let r = z.norm();
    if r > 1.0 {
        z / r
    } else {
        z
    }
}

/// Compass search on the closed disc, starting at `z0` with step `h`.
pub(crate) fn local_min(f: &dyn Fn(C64) -> f64, z0: C64, mut h: f64) -> (C64, f64) {
    let dirs: [C64; 8] = std::array::from_fn(|j| C64::from_polar(1.0, j as f64 * std::f64::consts::FRAC_PI_4));
    let mut z = z0;
    let mut fz = f(z);
    let mut evals = 0;
    while h > 1e-12 && evals < 20_000 {
        let mut improved = false;
        for d in dirs {
            let cand = clamp_disc(z + d * h);
            let fc = f(cand);
            evals += 1;
            if fc < fz {
                z = cand;
                fz = fc;
                improved = true;
                break;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (z, fz)
}

/// Minimum of `|∂_ζ g|` over the grid and the origin, refined by a local
/// search around the best few candidates.
pub fn immersion_margin(g: &SpectralField, grid: &DiscGrid) -> ImmersionMargin {
    let dg = complex_derivative(g, Derivative::Zeta);
    let f = |z: C64| norm(&dg.eval(z));
    let mut cands: Vec<(C64, f64)> = grid
        .points()
        .chain(std::iter::once(C64::new(0.0, 0.0)))
        .chain((0..grid.n_theta()).map(|j| C64::from_polar(1.0, grid.theta(j))))
        .map(|z| (z, f(z)))
        .collect();
    cands.sort_by(|a, b| a.1.total_cmp(&b.1));
    let h = 2.0 / grid.n_r().max(grid.n_theta() / 2) as f64;
    let mut best = cands[0];
    for &(z0, _) in cands.iter().take(6) {
        let (z, v) = local_min(&f, z0, h);
        if v < best.1 {
            best = (z, v);
        }
    }
    ImmersionMargin {
        margin: best.1,
        at: [best.0.re, best.0.im],
    }
}
