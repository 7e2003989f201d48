use std::f64::consts::PI;

use num_complex::Complex64 as C64;

/// Gauss-Legendre nodes and weights on `[0, 1]`, ascending.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x descends with i; map [-1,1] -> [0,1]
        nodes[i] = (1.0 - x) / 2.0;
        nodes[n - 1 - i] = (1.0 + x) / 2.0;
        weights[i] = w / 2.0;
        weights[n - 1 - i] = w / 2.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Polar tensor grid on the closed unit disc: Gauss-Legendre radii in `(0,1)`
/// and uniform angles. Point `p = i_r * n_theta + j_theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscGrid {
    n_r: usize,
    n_theta: usize,
    radii: Vec<f64>,
    radial_weights: Vec<f64>,
}

impl DiscGrid {
    pub fn new(n_r: usize, n_theta: usize) -> Self {
        assert!(n_r > 0 && n_theta > 0);
        let (radii, radial_weights) = gauss_legendre_unit(n_r);
        Self {
            n_r,
            n_theta,
            radii,
            radial_weights,
        }
    }

    /// Smallest grid resolving analysis to `degree`.
    pub fn for_degree(degree: usize) -> Self {
        Self::new(degree + 3, 2 * degree + 6)
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    pub fn point(&self, p: usize) -> C64 {
        let (i, j) = (p / self.n_theta, p % self.n_theta);
        C64::from_polar(self.radii[i], self.theta(j))
    }

    pub fn points(&self) -> impl Iterator<Item = C64> + '_ {
        (0..self.len()).map(|p| self.point(p))
    }

    /// Area weight of point `p`; the weights integrate `r^a e^{ikθ}` exactly for
    /// `a + 1 ≤ 2 n_r − 1` and `|k| < n_theta`.
    pub fn area_weight(&self, p: usize) -> f64 {
        let i = p / self.n_theta;
        self.radial_weights[i] * self.radii[i] * 2.0 * PI / self.n_theta as f64
    }

    pub fn min_radius(&self) -> f64 {
        self.radii[0]
    }

    /// Whether analysis up to `degree` is well posed on this grid.
    pub fn resolves(&self, degree: usize) -> bool {
        self.n_theta >= 2 * degree + 2 && self.n_r > degree
    }

    /// Same radii, angular resolution multiplied by `factor`.
    pub fn refined_angular(&self, factor: usize) -> Self {
        Self::new(self.n_r, self.n_theta * factor)
    }
}

impl Default for DiscGrid {
    fn default() -> Self {
        Self::new(24, 48)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre_unit(9);
        for p in 0..18 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
            assert!((q - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "p = {p}");
        }
        assert!(x.windows(2).all(|s| s[0] < s[1]));
        assert!(x[0] > 0.0 && x[8] < 1.0);
    }

    #[test]
    fn area_quadrature_matches_closed_form() {
        let degree = 8;
        let g = DiscGrid::new(degree + 1, 2 * degree + 2);
        for m in 0..=2 * degree {
            for l in 0..=(2 * degree - m) {
                let q: C64 = (0..g.len())
                    .map(|p| {
                        let z = g.point(p);
                        z.powu(m as u32) * z.conj().powu(l as u32) * g.area_weight(p)
                    })
                    .sum();
                let exact = if m == l {
                    2.0 * PI / (m + l + 2) as f64
                } else {
                    0.0
                };
                assert!((q - exact).norm() < 1e-12, "m={m} l={l} q={q}");
            }
        }
    }

    #[test]
    fn default_grid_has_no_center_or_boundary_nodes() {
        let g = DiscGrid::default();
        assert_eq!(g.len(), 24 * 48);
        assert!(g.points().all(|z| z.norm() > 0.0 && z.norm() < 1.0));
    }
}
