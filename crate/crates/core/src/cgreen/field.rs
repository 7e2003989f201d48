//! Vector fields on the closed unit disc in the monomial basis `ζᵐζ̄ˡ`,
//! `m + l ≤ N`, and their transforms to and from the polar grid.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use super::grid::DiscGrid;
use crate::error::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Number of monomials of total degree `≤ degree`.
pub const fn mono_count(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Position of `ζᵐζ̄ˡ`; independent of the degree budget.
pub const fn mono_index(m: usize, l: usize) -> usize {
    let d = m + l;
    d * (d + 1) / 2 + l
}

/// Inverse of [`mono_index`].
pub fn mono_of(index: usize) -> (usize, usize) {
    let mut d = ((((8 * index + 1) as f64).sqrt() - 1.0) / 2.0) as usize;
    while mono_index(0, d + 1) <= index {
        d += 1;
    }
    while mono_index(d, 0) > index {
        d -= 1;
    }
    let l = index - d * (d + 1) / 2;
    (d - l, l)
}

/// Exact area integral `∫_𝔻 ζᵃζ̄ᵇ dA`.
pub fn monomial_integral(a: usize, b: usize) -> f64 {
    if a == b {
        2.0 * PI / (a + b + 2) as f64
    } else {
        0.0
    }
}

/// A `ℂ^ncomp`-valued polynomial `Σ c_{m,l} ζᵐζ̄ˡ` on the disc.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    ncomp: usize,
    degree: usize,
    coeffs: Vec<C64>,
}

impl SpectralField {
    pub fn zeros(ncomp: usize, degree: usize) -> Self {
        Self {
            ncomp,
            degree,
            coeffs: vec![ZERO; ncomp * mono_count(degree)],
        }
    }

    pub fn from_coeffs(ncomp: usize, degree: usize, coeffs: Vec<C64>) -> Self {
        assert_eq!(coeffs.len(), ncomp * mono_count(degree));
        Self {
            ncomp,
            degree,
            coeffs,
        }
    }

    /// Scalar constant.
    pub fn constant(c: C64) -> Self {
        Self::from_coeffs(1, 0, vec![c])
    }

    /// Constant vector field.
    pub fn constant_vector(v: &[C64]) -> Self {
        Self::from_coeffs(v.len(), 0, v.to_vec())
    }

    /// Scalar `c ζᵐζ̄ˡ`.
    pub fn monomial(m: usize, l: usize, c: C64) -> Self {
        let mut f = Self::zeros(1, m + l);
        f.set(0, m, l, c);
        f
    }

    /// Scalar field from `(m, l, c)` triples.
    pub fn scalar_from_terms(terms: &[(usize, usize, C64)]) -> Self {
        let degree = terms.iter().map(|&(m, l, _)| m + l).max().unwrap_or(0);
        let mut f = Self::zeros(1, degree);
        for &(m, l, c) in terms {
            f.add_at(0, m, l, c);
        }
        f
    }

    /// Stacks scalar fields into a vector field.
    pub fn from_components(parts: &[SpectralField]) -> Self {
        let degree = parts.iter().map(|p| p.degree).max().unwrap_or(0);
        let mut out = Self::zeros(parts.len(), degree);
        for (c, p) in parts.iter().enumerate() {
            assert_eq!(p.ncomp, 1, "components must be scalar");
            let d = mono_count(p.degree);
            out.comp_mut(c)[..d].copy_from_slice(&p.coeffs);
        }
        out
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn comp(&self, c: usize) -> &[C64] {
        let d = mono_count(self.degree);
        &self.coeffs[c * d..(c + 1) * d]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [C64] {
        let d = mono_count(self.degree);
        &mut self.coeffs[c * d..(c + 1) * d]
    }

    pub fn component(&self, c: usize) -> SpectralField {
        Self::from_coeffs(1, self.degree, self.comp(c).to_vec())
    }

    pub fn get(&self, c: usize, m: usize, l: usize) -> C64 {
        if m + l > self.degree {
            return ZERO;
        }
        self.comp(c)[mono_index(m, l)]
    }

    pub fn set(&mut self, c: usize, m: usize, l: usize, v: C64) {
        assert!(m + l <= self.degree, "monomial beyond degree budget");
        let i = mono_index(m, l);
        self.comp_mut(c)[i] = v;
    }

    pub fn add_at(&mut self, c: usize, m: usize, l: usize, v: C64) {
        assert!(m + l <= self.degree, "monomial beyond degree budget");
        let i = mono_index(m, l);
        self.comp_mut(c)[i] += v;
    }

    /// Iterates `(component, m, l, coefficient)` over nonzero coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, usize, C64)> + '_ {
        let d = mono_count(self.degree);
        self.coeffs.iter().enumerate().filter(|(_, c)| **c != ZERO).map(move |(k, &c)| {
            let (m, l) = mono_of(k % d);
            (k / d, m, l, c)
        })
    }

    /// Re-embeds with a different degree budget; truncates when lowering.
    pub fn with_degree(&self, degree: usize) -> Self {
        let mut out = Self::zeros(self.ncomp, degree);
        let keep = mono_count(degree.min(self.degree));
        for c in 0..self.ncomp {
            out.comp_mut(c)[..keep].copy_from_slice(&self.comp(c)[..keep]);
        }
        out
    }

    /// Highest total degree with a coefficient above `tol` in magnitude.
    pub fn effective_degree(&self, tol: f64) -> usize {
        self.terms()
            .filter(|t| t.3.norm() > tol)
            .map(|(_, m, l, _)| m + l)
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, c| a.max(c.norm()))
    }

    /// Values of every component at `zeta`.
    pub fn eval(&self, zeta: C64) -> Vec<C64> {
        let pz = powers(zeta, self.degree);
        let pzb = powers(zeta.conj(), self.degree);
        (0..self.ncomp)
            .map(|c| {
                self.comp(c)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != ZERO)
                    .map(|(k, v)| {
                        let (m, l) = mono_of(k);
                        v * pz[m] * pzb[l]
                    })
                    .sum()
            })
            .collect()
    }

    pub fn value_at_zero(&self) -> Vec<C64> {
        (0..self.ncomp).map(|c| self.comp(c)[0]).collect()
    }

    /// Pointwise complex conjugate: `c ζᵐζ̄ˡ ↦ c̄ ζˡζ̄ᵐ`.
    pub fn conj(&self) -> Self {
        let mut out = Self::zeros(self.ncomp, self.degree);
        for (c, m, l, v) in self.terms() {
            out.set(c, l, m, v.conj());
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_coeffs(self.ncomp, self.degree, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Product of two scalar fields (exact; degrees add).
    pub fn mul_scalar(&self, other: &Self) -> Self {
        assert!(self.ncomp == 1 && other.ncomp == 1);
        let mut out = Self::zeros(1, self.degree + other.degree);
        for (_, m1, l1, a) in self.terms() {
            for (_, m2, l2, b) in other.terms() {
                out.coeffs[mono_index(m1 + m2, l1 + l2)] += a * b;
            }
        }
        out
    }

    /// `ζᵏ · self`.
    pub fn shift_zeta(&self, k: usize) -> Self {
        let mut out = Self::zeros(self.ncomp, self.degree + k);
        for (c, m, l, v) in self.terms() {
            out.set(c, m + k, l, v);
        }
        out
    }

    /// Whether all `ζ̄`-dependent coefficients vanish within `tol`.
    pub fn is_holomorphic(&self, tol: f64) -> bool {
        self.terms().all(|(_, _, l, v)| l == 0 || v.norm() <= tol)
    }

    /// Exact `L²(𝔻)` norm, `‖u‖² = Σ_j ∫|u_j|² dA`.
    pub fn l2_norm(&self) -> f64 {
        let mut acc = 0.0;
        for c in 0..self.ncomp {
            let comp = self.comp(c);
            // Only monomials with equal m − l couple.
            for (i, a) in comp.iter().enumerate().filter(|(_, a)| **a != ZERO) {
                let (m1, l1) = mono_of(i);
                for (j, b) in comp.iter().enumerate().filter(|(_, b)| **b != ZERO) {
                    let (m2, l2) = mono_of(j);
                    if m1 + l2 == m2 + l1 {
                        acc += (a * b.conj()).re * monomial_integral(m1 + l2, l1 + m2);
                    }
                }
            }
        }
        acc.max(0.0).sqrt()
    }

    /// Maximum over grid points of the Euclidean norm of the value.
    pub fn sup_on(&self, grid: &DiscGrid) -> f64 {
        let vals = synthesize(self, grid);
        vals.pointwise_norms().into_iter().fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

fn powers(x: C64, n: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut p = C64::new(1.0, 0.0);
    for _ in 0..=n {
        out.push(p);
        p *= x;
    }
    out
}

fn combine(a: &SpectralField, b: &SpectralField, sign: f64) -> SpectralField {
    assert_eq!(a.ncomp, b.ncomp, "component count mismatch");
    let degree = a.degree.max(b.degree);
    let mut out = a.with_degree(degree);
    let db = mono_count(b.degree);
    for c in 0..b.ncomp {
        let dst = out.comp_mut(c);
        for (k, v) in b.comp(c).iter().enumerate() {
            dst[k] += v * sign;
        }
        debug_assert!(db <= dst.len());
    }
    out
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        combine(self, rhs, 1.0)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        combine(self, rhs, -1.0)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul<C64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, s: C64) -> SpectralField {
        self.scale(s)
    }
}

/// Holomorphic `ℂⁿ`-valued polynomial `φ(ζ) = Σ φ_m ζᵐ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HolomorphicDatum {
    taylor: Vec<Vec<C64>>,
    n: usize,
}

impl HolomorphicDatum {
    /// `taylor[m]` is the coefficient vector of `ζᵐ`.
    pub fn new(taylor: Vec<Vec<C64>>) -> Self {
        assert!(!taylor.is_empty());
        let n = taylor[0].len();
        assert!(taylor.iter().all(|t| t.len() == n));
        Self { taylor, n }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![vec![ZERO; n]])
    }

    pub fn constant(v: &[C64]) -> Self {
        Self::new(vec![v.to_vec()])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.taylor.len() - 1
    }

    pub fn taylor(&self) -> &[Vec<C64>] {
        &self.taylor
    }

    /// Membership in `H₀`: `φ(0) = 0`.
    pub fn vanishes_at_zero(&self) -> bool {
        self.taylor[0].iter().all(|c| *c == ZERO)
    }

    pub fn to_field(&self) -> SpectralField {
        let mut f = SpectralField::zeros(self.n, self.order());
        for (m, v) in self.taylor.iter().enumerate() {
            for (c, x) in v.iter().enumerate() {
                f.set(c, m, 0, *x);
            }
        }
        f
    }

    /// Holomorphic part of a field; fails if any `ζ̄` coefficient exceeds `tol`.
    pub fn from_field(f: &SpectralField, tol: f64) -> Result<Self> {
        if !f.is_holomorphic(tol) {
            return Err(Error::ModeMismatch("field is not holomorphic".into()));
        }
        let taylor = (0..=f.degree())
            .map(|m| (0..f.ncomp()).map(|c| f.get(c, m, 0)).collect())
            .collect();
        Ok(Self::new(taylor))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(
            self.taylor
                .iter()
                .map(|v| v.iter().map(|x| x * s).collect())
                .collect(),
        )
    }

    pub fn l2_norm(&self) -> f64 {
        self.taylor
            .iter()
            .enumerate()
            .map(|(m, v)| v.iter().map(|x| x.norm_sqr()).sum::<f64>() * PI / (m + 1) as f64)
            .sum::<f64>()
            .sqrt()
    }
}

/// Values of a vector field on a [`DiscGrid`]; component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridValues {
    ncomp: usize,
    npoints: usize,
    values: Vec<C64>,
}

impl GridValues {
    pub fn zeros(ncomp: usize, npoints: usize) -> Self {
        Self {
            ncomp,
            npoints,
            values: vec![ZERO; ncomp * npoints],
        }
    }

    pub fn from_fn(grid: &DiscGrid, ncomp: usize, f: impl Fn(C64) -> Vec<C64>) -> Self {
        let mut out = Self::zeros(ncomp, grid.len());
        for p in 0..grid.len() {
            let v = f(grid.point(p));
            assert_eq!(v.len(), ncomp);
            for (c, x) in v.into_iter().enumerate() {
                out.values[c * grid.len() + p] = x;
            }
        }
        out
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn npoints(&self) -> usize {
        self.npoints
    }

    pub fn comp(&self, c: usize) -> &[C64] {
        &self.values[c * self.npoints..(c + 1) * self.npoints]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [C64] {
        &mut self.values[c * self.npoints..(c + 1) * self.npoints]
    }

    pub fn at(&self, c: usize, p: usize) -> C64 {
        self.values[c * self.npoints + p]
    }

    pub fn point_value(&self, p: usize) -> Vec<C64> {
        (0..self.ncomp).map(|c| self.at(c, p)).collect()
    }

    pub fn pointwise_norms(&self) -> Vec<f64> {
        (0..self.npoints)
            .map(|p| (0..self.ncomp).map(|c| self.at(c, p).norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    pub fn max_norm(&self) -> f64 {
        self.pointwise_norms().into_iter().fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            ncomp: self.ncomp,
            npoints: self.npoints,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Grid quadrature of `Σ_j ∫ u_j v̄_j dA`.
    pub fn inner(&self, other: &Self, grid: &DiscGrid) -> C64 {
        assert_eq!(self.ncomp, other.ncomp);
        assert_eq!(self.npoints, grid.len());
        let mut acc = ZERO;
        for c in 0..self.ncomp {
            for p in 0..self.npoints {
                acc += self.at(c, p) * other.at(c, p).conj() * grid.area_weight(p);
            }
        }
        acc
    }
}

/// Evaluates a field on every grid point.
pub fn synthesize(f: &SpectralField, grid: &DiscGrid) -> GridValues {
    let mut out = GridValues::zeros(f.ncomp(), grid.len());
    let terms: Vec<_> = f.terms().collect();
    for p in 0..grid.len() {
        let z = grid.point(p);
        let pz = powers(z, f.degree());
        let pzb = powers(z.conj(), f.degree());
        for &(c, m, l, v) in &terms {
            out.values[c * grid.len() + p] += v * pz[m] * pzb[l];
        }
    }
    out
}

/// Grid-to-coefficient transform for a fixed grid and degree: angular FFT per
/// ring, then a weighted least-squares fit in `r^{|k|+2j}` per angular mode `k`.
pub struct Analyzer {
    grid: DiscGrid,
    degree: usize,
    /// Thin QR factors of the weighted radial Vandermonde for each `|k|`.
    radial_qr: Vec<(DMatrix<f64>, DMatrix<f64>)>,
    sqrt_weights: Vec<f64>,
    fft: Arc<dyn rustfft::Fft<f64>>,
}

impl std::fmt::Debug for Analyzer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Analyzer")
            .field("grid", &(self.grid.n_r(), self.grid.n_theta()))
            .field("degree", &self.degree)
            .finish()
    }
}

impl Analyzer {
    pub fn new(grid: &DiscGrid, degree: usize) -> Result<Self> {
        if !grid.resolves(degree) {
            return Err(Error::UnderResolved {
                n_r: grid.n_r(),
                n_theta: grid.n_theta(),
                degree,
            });
        }
        let radii = grid.radii();
        let sw: Vec<f64> = radii
            .iter()
            .zip(grid.radial_weights())
            .map(|(r, w)| (r * w).sqrt())
            .collect();
        let radial_qr = (0..=degree)
            .map(|k| {
                let cols = (degree - k) / 2 + 1;
                let v = DMatrix::from_fn(radii.len(), cols, |i, j| sw[i] * radii[i].powi((k + 2 * j) as i32));
                let qr = v.qr();
                (qr.q().transpose(), qr.r())
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(grid.n_theta());
        Ok(Self {
            grid: grid.clone(),
            degree,
            radial_qr,
            sqrt_weights: sw,
            fft,
        })
    }

    pub fn grid(&self) -> &DiscGrid {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn analyze(&self, values: &GridValues) -> SpectralField {
        assert_eq!(values.npoints(), self.grid.len(), "values do not match grid");
        let (n_r, n_t) = (self.grid.n_r(), self.grid.n_theta());
        let mut out = SpectralField::zeros(values.ncomp(), self.degree);
        let mut modes = vec![vec![ZERO; n_t]; n_r];
        for c in 0..values.ncomp() {
            let vals = values.comp(c);
            for (i, ring) in modes.iter_mut().enumerate() {
                ring.copy_from_slice(&vals[i * n_t..(i + 1) * n_t]);
                self.fft.process(ring);
                for x in ring.iter_mut() {
                    *x /= n_t as f64;
                }
            }
            for k in -(self.degree as i64)..=(self.degree as i64) {
                let slot = k.rem_euclid(n_t as i64) as usize;
                let ak = k.unsigned_abs() as usize;
                let (qt, r) = &self.radial_qr[ak];
                let rhs = DMatrix::from_fn(n_r, 2, |i, part| {
                    let v = modes[i][slot];
                    self.sqrt_weights[i] * if part == 0 { v.re } else { v.im }
                });
                let sol = r
                    .solve_upper_triangular(&(qt * rhs))
                    .expect("radial Vandermonde has full column rank");
                for j in 0..sol.nrows() {
                    let acc = C64::new(sol[(j, 0)], sol[(j, 1)]);
                    let p = ak + 2 * j;
                    // r^p e^{ikθ} = ζ^{(p+k)/2} ζ̄^{(p−k)/2}
                    let m = ((p as i64 + k) / 2) as usize;
                    let l = ((p as i64 - k) / 2) as usize;
                    out.set(c, m, l, acc);
                }
            }
        }
        out
    }
}

/// One-shot analysis; builds the radial factorizations each call.
pub fn analyze(values: &GridValues, grid: &DiscGrid, degree: usize) -> Result<SpectralField> {
    Ok(Analyzer::new(grid, degree)?.analyze(values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn monomial_indexing_is_a_bijection() {
        for k in 0..mono_count(30) {
            let (m, l) = mono_of(k);
            assert_eq!(mono_index(m, l), k);
        }
        assert_eq!(mono_count(16), 153);
    }

    #[test]
    fn analyze_constant_and_single_monomial() {
        let grid = DiscGrid::default();
        let one = GridValues::from_fn(&grid, 1, |_| vec![c(1.0, 0.0)]);
        let f = analyze(&one, &grid, 16).unwrap();
        assert!((f.get(0, 0, 0) - c(1.0, 0.0)).norm() < 1e-10);
        assert!(f.terms().filter(|t| (t.1, t.2) != (0, 0)).all(|t| t.3.norm() < 1e-10));

        let vals = GridValues::from_fn(&grid, 1, |z| vec![z * z * z.conj()]);
        let f = analyze(&vals, &grid, 16).unwrap();
        assert!((f.get(0, 2, 1) - c(1.0, 0.0)).norm() < 1e-10);
        assert!(f.terms().filter(|t| (t.1, t.2) != (2, 1)).all(|t| t.3.norm() < 1e-10));
    }

    #[test]
    fn exp_resynthesis_residual() {
        let grid = DiscGrid::default();
        let vals = GridValues::from_fn(&grid, 1, |z| vec![z.exp() / 2.0]);
        let f = analyze(&vals, &grid, 16).unwrap();
        let back = synthesize(&f, &grid);
        let err = (0..grid.len())
            .map(|p| (back.at(0, p) - vals.at(0, p)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "err = {err:e}");
    }

    #[test]
    fn under_resolved_grid_is_rejected() {
        let grid = DiscGrid::new(10, 20);
        assert!(matches!(
            Analyzer::new(&grid, 16),
            Err(Error::UnderResolved { .. })
        ));
    }

    #[test]
    fn conj_and_norm() {
        let f = SpectralField::scalar_from_terms(&[(1, 0, c(1.0, 0.0))]);
        assert!((f.l2_norm() - (PI / 2.0).sqrt()).abs() < 1e-14);
        let g = f.conj();
        assert_eq!(g.get(0, 0, 1), c(1.0, 0.0));
        let one = SpectralField::constant(c(1.0, 0.0));
        assert!((one.l2_norm() - PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn holomorphic_datum_field_round_trip() {
        let d = HolomorphicDatum::new(vec![vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.5, 0.5), c(1.0, 0.0)]]);
        assert!(d.vanishes_at_zero());
        let f = d.to_field();
        assert_eq!(f.get(0, 1, 0), c(0.5, 0.5));
        assert_eq!(f.get(1, 1, 0), c(1.0, 0.0));
        assert_eq!(HolomorphicDatum::from_field(&f, 0.0).unwrap(), d);
        assert!((d.l2_norm() - f.l2_norm()).abs() < 1e-14);
        let nonhol = SpectralField::monomial(0, 1, c(1.0, 0.0));
        assert!(HolomorphicDatum::from_field(&nonhol, 1e-12).is_err());
    }
}
