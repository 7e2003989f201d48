use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cgreen::{complex_derivative, zeta_derivative_n, Derivative, SpectralField};
use crate::error::{Error, Result};
use crate::poly::{PolyTermJson, PolynomialMap, Var};

use super::jets::{local_min, JetExtension};

/// `|h| ≤ ZERO_TOL` counts as a point of `j^k g ∩ S`.
pub const ZERO_TOL: f64 = 1e-8;
/// Singular values above this count toward rank.
pub const RANK_TOL: f64 = 1e-6;
/// Side of the square lattice scanned for intersections.
pub const LATTICE: usize = 81;
const MAX_REPORTED: usize = 64;

/// A real submanifold `S = {Σ = 0}` of the `k`-jet space, given by `c`
/// polynomials `Σ_i = Re p_i(ζ, z⁽⁰⁾, …, z⁽ᵏ⁾)` in the flattened jet
/// coordinates `z⁽ʲ⁾ ∈ ℂⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetSubmanifold {
    n: usize,
    k: usize,
    sigma: Vec<PolynomialMap>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmanifoldJson {
    pub n: usize,
    pub k: usize,
    pub sigma: Vec<Vec<PolyTermJson>>,
}

impl JetSubmanifold {
    pub fn new(n: usize, k: usize, sigma: Vec<PolynomialMap>) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::DimensionMismatch("submanifold needs at least one equation".into()));
        }
        if let Some(p) = sigma.iter().find(|p| p.num_vars_z() != n * (k + 1)) {
            return Err(Error::DimensionMismatch(format!(
                "equation has {} jet variables, expected n(k+1) = {}",
                p.num_vars_z(),
                n * (k + 1)
            )));
        }
        Ok(Self { n, k, sigma })
    }

    /// `{z⁽ʲ⁾ = 0}`, real codimension `2n`.
    pub fn jet_vanishing(n: usize, k: usize, j: usize) -> Result<Self> {
        if j > k {
            return Err(Error::DimensionMismatch(format!("jet order {j} exceeds k = {k}")));
        }
        let nv = n * (k + 1);
        let mut sigma = Vec::with_capacity(2 * n);
        for c in 0..n {
            let z = PolynomialMap::z(nv, j * n + c);
            sigma.push(z.scale(C64::new(1.0, 0.0)));
            sigma.push(z.scale(C64::new(0.0, -1.0)));
        }
        Self::new(n, k, sigma)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn codim(&self) -> usize {
        self.sigma.len()
    }

    pub fn equations(&self) -> &[PolynomialMap] {
        &self.sigma
    }

    pub fn eval(&self, zeta: C64, jet: &[C64]) -> Vec<f64> {
        self.sigma.iter().map(|p| p.eval(zeta, jet).re).collect()
    }

    /// Real Jacobian of `Σ` in `(Re ζ, Im ζ, Re z_v, Im z_v, …)`.
    pub fn jacobian(&self, zeta: C64, jet: &[C64]) -> DMatrix<f64> {
        let nv = self.n * (self.k + 1);
        let i = C64::new(0.0, 1.0);
        let mut m = DMatrix::zeros(self.codim(), 2 + 2 * nv);
        for (r, p) in self.sigma.iter().enumerate() {
            let dz = p.partial(Var::Zeta).eval(zeta, jet);
            let dzb = p.partial(Var::ZetaBar).eval(zeta, jet);
            m[(r, 0)] = (dz + dzb).re;
            m[(r, 1)] = (i * (dz - dzb)).re;
            for v in 0..nv {
                let a = p.partial(Var::Z(v)).eval(zeta, jet);
                let b = p.partial(Var::ZBar(v)).eval(zeta, jet);
                m[(r, 2 + 2 * v)] = (a + b).re;
                m[(r, 3 + 2 * v)] = (i * (a - b)).re;
            }
        }
        m
    }

    pub fn to_json(&self) -> SubmanifoldJson {
        SubmanifoldJson {
            n: self.n,
            k: self.k,
            sigma: self.sigma.iter().map(|p| p.to_json_terms()).collect(),
        }
    }

    pub fn from_json(j: &SubmanifoldJson) -> Result<Self> {
        let nv = j.n * (j.k + 1);
        let sigma = j
            .sigma
            .iter()
            .map(|t| PolynomialMap::from_json_terms(nv, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(j.n, j.k, sigma)
    }
}

/// One point of `j^k g ∩ S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionPoint {
    pub zeta: [f64; 2],
    pub residual: f64,
    /// Smallest singular value of `d(Σ ∘ j^k g)` (`c × 2`); zero when `c > 2`.
    pub sigma_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransversalityReport {
    pub codim: usize,
    pub transverse: bool,
    pub zero_count: usize,
    /// At most the first 64 intersection points.
    pub zeros: Vec<IntersectionPoint>,
    /// Smallest `|Σ(j^k g)|` found on the lattice after refinement.
    pub min_abs: f64,
    /// Smallest `σ_min` over intersection points, or `min_abs` when the
    /// intersection is empty.
    pub margin: f64,
}

/// `h = Σ ∘ j^k g` together with its real derivative in `ζ`.
struct Composite<'a> {
    sub: &'a JetSubmanifold,
    ext: JetExtension,
    /// `∂_ζ^{k+1} g`.
    top: SpectralField,
    /// `∂_ζ̄ ∂_ζʲ g` for `j ≤ k`.
    dbar: Vec<SpectralField>,
}

impl<'a> Composite<'a> {
    fn new(g: &SpectralField, sub: &'a JetSubmanifold) -> Self {
        let top = zeta_derivative_n(g, sub.k + 1);
        let ext_k = JetExtension::new(g, sub.k);
        let dbar = ext_k
            .derivatives()
            .iter()
            .map(|d| complex_derivative(d, Derivative::ZetaBar))
            .collect();
        Self {
            sub,
            ext: ext_k,
            top,
            dbar,
        }
    }

    fn jet(&self, zeta: C64) -> Vec<C64> {
        self.ext.at(zeta).flat()
    }

    fn h(&self, zeta: C64) -> Vec<f64> {
        self.sub.eval(zeta, &self.jet(zeta))
    }

    fn abs(&self, zeta: C64) -> f64 {
        self.h(zeta).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `c × 2` matrix `[∂_x h, ∂_y h]`.
    fn dh(&self, zeta: C64) -> DMatrix<f64> {
        let n = self.sub.n;
        let k = self.sub.k;
        let jet = self.jet(zeta);
        let i = C64::new(0.0, 1.0);
        // ∂_ζ and ∂_ζ̄ of each jet coordinate
        let mut d = Vec::with_capacity(jet.len());
        let mut db = Vec::with_capacity(jet.len());
        for j in 0..=k {
            let next = if j < k {
                self.ext.derivatives()[j + 1].eval(zeta)
            } else {
                self.top.eval(zeta)
            };
            d.extend(next);
            db.extend(self.dbar[j].eval(zeta));
        }
        debug_assert_eq!(d.len(), n * (k + 1));
        let jac = self.sub.jacobian(zeta, &jet);
        let mut out = DMatrix::zeros(self.sub.codim(), 2);
        for r in 0..self.sub.codim() {
            let mut hx = jac[(r, 0)];
            let mut hy = jac[(r, 1)];
            for v in 0..jet.len() {
                let x = d[v] + db[v];
                let y = i * (d[v] - db[v]);
                hx += jac[(r, 2 + 2 * v)] * x.re + jac[(r, 3 + 2 * v)] * x.im;
                hy += jac[(r, 2 + 2 * v)] * y.re + jac[(r, 3 + 2 * v)] * y.im;
            }
            out[(r, 0)] = hx;
            out[(r, 1)] = hy;
        }
        out
    }

    fn check_rank(&self, zeta: C64) -> Result<()> {
        let jac = self.sub.jacobian(zeta, &self.jet(zeta));
        let c = self.sub.codim();
        let rank = jac
            .svd(false, false)
            .singular_values
            .iter()
            .filter(|&&s| s > RANK_TOL)
            .count();
        if rank < c {
            return Err(Error::RankHypothesisViolated { rank, codim: c });
        }
        Ok(())
    }

    fn point(&self, zeta: C64) -> IntersectionPoint {
        let c = self.sub.codim();
        let sigma_min = if c > 2 {
            0.0
        } else {
            let s = self.dh(zeta).svd(false, false).singular_values;
            s.iter().take(c).copied().fold(f64::INFINITY, f64::min)
        };
        IntersectionPoint {
            zeta: [zeta.re, zeta.im],
            residual: self.abs(zeta),
            sigma_min,
        }
    }
}

fn lattice() -> Vec<Option<C64>> {
    let step = 2.0 / (LATTICE - 1) as f64;
    let mut pts = Vec::with_capacity(LATTICE * LATTICE);
    for iy in 0..LATTICE {
        for ix in 0..LATTICE {
            let z = C64::new(-1.0 + ix as f64 * step, -1.0 + iy as f64 * step);
            pts.push((z.norm() <= 1.0 + 1e-12).then_some(z));
        }
    }
    pts
}

fn bisect(comp: &Composite<'_>, mut a: C64, mut b: C64, mut ha: f64) -> C64 {
    for _ in 0..80 {
        let m = (a + b) * 0.5;
        let hm = comp.h(m)[0];
        if hm == 0.0 {
            return m;
        }
        if (hm > 0.0) == (ha > 0.0) {
            a = m;
            ha = hm;
        } else {
            b = m;
        }
    }
    (a + b) * 0.5
}

fn newton2(comp: &Composite<'_>, mut z: C64) -> Option<C64> {
    for _ in 0..40 {
        let h = comp.h(z);
        if (h[0] * h[0] + h[1] * h[1]).sqrt() < 1e-14 {
            break;
        }
        let j = comp.dh(z);
        let det = j[(0, 0)] * j[(1, 1)] - j[(0, 1)] * j[(1, 0)];
        if det.abs() < 1e-300 || !det.is_finite() {
            return None;
        }
        let dx = (j[(1, 1)] * h[0] - j[(0, 1)] * h[1]) / det;
        let dy = (-j[(1, 0)] * h[0] + j[(0, 0)] * h[1]) / det;
        z -= C64::new(dx, dy);
        if !z.re.is_finite() || z.norm() > 1.5 {
            return None;
        }
    }
    Some(z)
}

fn push_unique(zeros: &mut Vec<C64>, z: C64, sep: f64) {
    if zeros.iter().all(|w| (w - z).norm() > sep) {
        zeros.push(z);
    }
}

/// Finds `j^k g ∩ S` on the closed disc and decides transversality: every
/// intersection point must have `rank d(Σ ∘ j^k g) = c`, so for `c ≥ 3` the
/// intersection must be empty.
pub fn transversality_report(g: &SpectralField, sub: &JetSubmanifold) -> Result<TransversalityReport> {
    if g.ncomp() != sub.n {
        return Err(Error::DimensionMismatch(format!(
            "disc has {} components, submanifold expects {}",
            g.ncomp(),
            sub.n
        )));
    }
    let comp = Composite::new(g, sub);
    let c = sub.codim();
    let pts = lattice();
    let vals: Vec<Option<Vec<f64>>> = pts.iter().map(|p| p.map(|z| comp.h(z))).collect();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();

    let mut ranked: Vec<(C64, f64)> = pts
        .iter()
        .zip(&vals)
        .filter_map(|(p, v)| Some((p.as_ref().copied()?, norm(v.as_ref()?))))
        .collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1));
    let h0 = 2.0 / (LATTICE - 1) as f64;
    let mut min_abs = ranked[0].1;
    let mut best_at = ranked[0].0;
    for &(z0, _) in ranked.iter().take(8) {
        let (z, v) = local_min(&|z| comp.abs(z), z0, h0);
        if v < min_abs {
            min_abs = v;
            best_at = z;
        }
    }

    let mut zeros: Vec<C64> = Vec::new();
    let idx = |ix: usize, iy: usize| iy * LATTICE + ix;
    for (p, v) in pts.iter().zip(&vals) {
        if let (Some(z), Some(v)) = (p, v) {
            if norm(v) <= ZERO_TOL {
                zeros.push(*z);
            }
        }
    }
    match c {
        1 => {
            for iy in 0..LATTICE {
                for ix in 0..LATTICE {
                    let (Some(a), Some(ha)) = (pts[idx(ix, iy)], &vals[idx(ix, iy)]) else {
                        continue;
                    };
                    for (jx, jy) in [(ix + 1, iy), (ix, iy + 1)] {
                        if jx >= LATTICE || jy >= LATTICE {
                            continue;
                        }
                        let (Some(b), Some(hb)) = (pts[idx(jx, jy)], &vals[idx(jx, jy)]) else {
                            continue;
                        };
                        if ha[0].abs() > ZERO_TOL && hb[0].abs() > ZERO_TOL && ha[0] * hb[0] < 0.0 {
                            zeros.push(bisect(&comp, a, b, ha[0]));
                        }
                    }
                }
            }
        }
        2 => {
            let mut found = Vec::new();
            for iy in 0..LATTICE - 1 {
                for ix in 0..LATTICE - 1 {
                    let corners = [idx(ix, iy), idx(ix + 1, iy), idx(ix, iy + 1), idx(ix + 1, iy + 1)];
                    let hs: Option<Vec<&Vec<f64>>> = corners.iter().map(|&q| vals[q].as_ref()).collect();
                    let Some(hs) = hs else { continue };
                    let brackets = (0..2).all(|r| {
                        let lo = hs.iter().map(|h| h[r]).fold(f64::INFINITY, f64::min);
                        let hi = hs.iter().map(|h| h[r]).fold(f64::NEG_INFINITY, f64::max);
                        lo <= 0.0 && hi >= 0.0
                    });
                    if !brackets {
                        continue;
                    }
                    let center = (pts[corners[0]].unwrap() + pts[corners[3]].unwrap()) * 0.5;
                    let z = newton2(&comp, center).unwrap_or(center);
                    if z.norm() <= 1.0 + 1e-9 && comp.abs(z) <= ZERO_TOL {
                        push_unique(&mut found, z, 1e-7);
                    }
                }
            }
            for z in found {
                push_unique(&mut zeros, z, 1e-7);
            }
        }
        _ => {
            if min_abs <= ZERO_TOL {
                push_unique(&mut zeros, best_at, 1e-7);
            }
        }
    }

    let mut points = Vec::with_capacity(zeros.len().min(MAX_REPORTED));
    let mut transverse = true;
    let mut margin = f64::INFINITY;
    for &z in &zeros {
        comp.check_rank(z)?;
        let ip = comp.point(z);
        if c > 2 || ip.sigma_min <= RANK_TOL {
            transverse = false;
        }
        margin = margin.min(ip.sigma_min);
        if points.len() < MAX_REPORTED {
            points.push(ip);
        }
    }
    if zeros.is_empty() {
        margin = min_abs;
    }
    Ok(TransversalityReport {
        codim: c,
        transverse,
        zero_count: zeros.len(),
        zeros: points,
        min_abs,
        margin,
    })
}
