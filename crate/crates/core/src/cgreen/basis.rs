//! Orthonormal basis of the truncated space `V_N = span{ζᵐζ̄ˡ : m+l ≤ N}`,
//! adapted to the point evaluation at the origin.
//!
//! Slots are indexed like monomials. For `m ≠ l` the slot holds the Zernike
//! function `√((n+1)/π) R_n^{|k|}(r) e^{ikθ}` with `n = m+l`, `k = m−l`. For the
//! radial slots `(m, m)`, `m ≥ 1`, it holds `√((2m+1)/π) R_{2m}^2(r)`, which
//! vanish at the origin, and slot `(0, 0)` holds the normalized reproducing
//! kernel at the origin. Every slot except `(0,0)` therefore vanishes at `0`,
//! and the `(0,0)` coordinate of `f` is `f(0)/‖K₀‖`.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use super::field::{mono_count, mono_index, mono_of, SpectralField};

/// One basis function: angular frequency `k` and radial terms `(p, c)` for
/// `Σ c r^p e^{ikθ}`; `zernike` holds the same radial part as
/// `Σ w R_n^{m}(r)` with entries `(n, m, w)`.
#[derive(Debug, Clone)]
struct Element {
    k: i64,
    radial: Vec<(usize, f64)>,
    zernike: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct DiscBasis {
    degree: usize,
    elements: Vec<Element>,
    /// Element indices grouped by angular frequency, offset by `degree`.
    by_freq: Vec<Vec<usize>>,
    center_norm: f64,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Coefficients `(power, c)` of the Zernike radial polynomial `R_n^m`.
pub fn zernike_radial(n: usize, m: usize) -> Vec<(usize, f64)> {
    assert!(m <= n && (n - m).is_multiple_of(2));
    (0..=(n - m) / 2)
        .map(|s| {
            let c = factorial(n - s)
                / (factorial(s) * factorial((n + m) / 2 - s) * factorial((n - m) / 2 - s));
            (n - 2 * s, if s % 2 == 0 { c } else { -c })
        })
        .collect()
}

impl DiscBasis {
    pub fn new(degree: usize) -> Self {
        let dim = mono_count(degree);
        let mut elements = Vec::with_capacity(dim);
        let mut center_sq = 0.0;
        for n in (0..=degree).step_by(2) {
            center_sq += (n + 1) as f64 / PI;
        }
        let center_norm = center_sq.sqrt();
        for idx in 0..dim {
            let (m, l) = mono_of(idx);
            let n = m + l;
            let k = m as i64 - l as i64;
            let zernike = if idx == 0 {
                (0..=degree)
                    .step_by(2)
                    .map(|n| {
                        let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
                        (n, 0, sign * (n + 1) as f64 / PI / center_norm)
                    })
                    .collect()
            } else if m == l {
                vec![(n, 2, ((n + 1) as f64 / PI).sqrt())]
            } else {
                vec![(n, k.unsigned_abs() as usize, ((n + 1) as f64 / PI).sqrt())]
            };
            let radial = if idx == 0 {
                let mut acc = vec![0.0; degree + 1];
                for n in (0..=degree).step_by(2) {
                    // Z_n^0(0) Z_n^0 with R_n^0(0) = (−1)^{n/2}
                    let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
                    let s = sign * (n + 1) as f64 / PI / center_norm;
                    for (p, c) in zernike_radial(n, 0) {
                        acc[p] += s * c;
                    }
                }
                acc.into_iter().enumerate().filter(|(_, c)| *c != 0.0).collect()
            } else if m == l {
                let s = ((n + 1) as f64 / PI).sqrt();
                zernike_radial(n, 2).into_iter().map(|(p, c)| (p, c * s)).collect()
            } else {
                let s = ((n + 1) as f64 / PI).sqrt();
                zernike_radial(n, k.unsigned_abs() as usize)
                    .into_iter()
                    .map(|(p, c)| (p, c * s))
                    .collect()
            };
            elements.push(Element { k, radial, zernike });
        }
        let mut by_freq = vec![Vec::new(); 2 * degree + 1];
        for (i, e) in elements.iter().enumerate() {
            by_freq[(e.k + degree as i64) as usize].push(i);
        }
        Self {
            degree,
            elements,
            by_freq,
            center_norm,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of complex slots per component.
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    /// `‖K₀‖`, so that `f(0) = ‖K₀‖ · coordinate(0)` for `f ∈ V_N`.
    pub fn center_norm(&self) -> f64 {
        self.center_norm
    }

    /// Basis function `i` in monomial form.
    pub fn element(&self, i: usize) -> SpectralField {
        let e = &self.elements[i];
        let mut f = SpectralField::zeros(1, self.degree);
        for &(p, c) in &e.radial {
            let (m, l) = monomial_of_polar(p, e.k);
            f.add_at(0, m, l, C64::new(c, 0.0));
        }
        f
    }

    /// `⟨ζᵃζ̄ᵇ, b_i⟩`, real because every basis function has real radial part.
    fn pair_monomial(&self, a: usize, b: usize, i: usize) -> f64 {
        let q = a + b;
        self.elements[i]
            .zernike
            .iter()
            .map(|&(n, m, w)| w * 2.0 * PI * zernike_moment(q, n, m))
            .sum()
    }

    /// Complex coordinates of every component, `coords[c][i] = ⟨f_c, b_i⟩`.
    /// Exact for fields in `V_N`; otherwise the orthogonal projection onto it.
    /// With `drop_center` the `(0,0)` slot is zeroed, which is the orthogonal
    /// projection onto the functions of `V_N` vanishing at the origin.
    pub fn coords(&self, f: &SpectralField, drop_center: bool) -> Vec<Vec<C64>> {
        let dim = self.dim();
        (0..f.ncomp())
            .map(|c| {
                let mut out = vec![C64::new(0.0, 0.0); dim];
                for (idx, v) in f.comp(c).iter().enumerate() {
                    if v.norm_sqr() == 0.0 {
                        continue;
                    }
                    let (a, b) = mono_of(idx);
                    let k = a as i64 - b as i64;
                    if k.unsigned_abs() as usize > self.degree {
                        continue;
                    }
                    for &i in &self.by_freq[(k + self.degree as i64) as usize] {
                        out[i] += v * self.pair_monomial(a, b, i);
                    }
                }
                if drop_center {
                    out[0] = C64::new(0.0, 0.0);
                }
                out
            })
            .collect()
    }

    /// Field of degree `N` from complex coordinates.
    pub fn field(&self, coords: &[Vec<C64>]) -> SpectralField {
        let mut f = SpectralField::zeros(coords.len(), self.degree);
        for (c, comp) in coords.iter().enumerate() {
            for (i, x) in comp.iter().enumerate() {
                if x.norm_sqr() == 0.0 {
                    continue;
                }
                let e = &self.elements[i];
                for &(p, r) in &e.radial {
                    let (m, l) = monomial_of_polar(p, e.k);
                    f.add_at(c, m, l, x * r);
                }
            }
        }
        f
    }

    /// Orthogonal projection onto `V_N` (or onto its origin-vanishing part).
    pub fn project(&self, f: &SpectralField, drop_center: bool) -> SpectralField {
        self.field(&self.coords(f, drop_center))
    }

    /// Real coordinates, layout `[component][slot][re, im]`. The Euclidean dot
    /// product of two such vectors equals `Re(u, v)`.
    pub fn to_real(&self, f: &SpectralField, drop_center: bool) -> DVector<f64> {
        let coords = self.coords(f, drop_center);
        let dim = self.dim();
        let mut out = DVector::zeros(2 * dim * coords.len());
        for (c, comp) in coords.iter().enumerate() {
            for (i, x) in comp.iter().enumerate() {
                out[2 * (c * dim + i)] = x.re;
                out[2 * (c * dim + i) + 1] = x.im;
            }
        }
        out
    }

    pub fn from_real(&self, ncomp: usize, x: &DVector<f64>) -> SpectralField {
        let dim = self.dim();
        assert_eq!(x.len(), 2 * dim * ncomp);
        let coords: Vec<Vec<C64>> = (0..ncomp)
            .map(|c| {
                (0..dim)
                    .map(|i| C64::new(x[2 * (c * dim + i)], x[2 * (c * dim + i) + 1]))
                    .collect()
            })
            .collect();
        self.field(&coords)
    }

    /// Real coordinate index of slot `(m, l)` of component `c`.
    pub fn real_index(&self, c: usize, m: usize, l: usize, imaginary: bool) -> usize {
        2 * (c * self.dim() + mono_index(m, l)) + imaginary as usize
    }
}

/// `∫₀¹ r^{q+1} R_n^m(r) dr = Π_{i=1}^{s}(q−m−2i+2) / Π_{i=0}^{s}(q+m+2+2i)`,
/// `s = (n−m)/2`; a cancellation-free product.
pub fn zernike_moment(q: usize, n: usize, m: usize) -> f64 {
    let s = (n - m) / 2;
    let (q, m) = (q as f64, m as f64);
    let mut v = 1.0 / (q + m + 2.0);
    for i in 1..=s {
        let i = i as f64;
        v *= (q - m - 2.0 * i + 2.0) / (q + m + 2.0 + 2.0 * i);
    }
    v
}

/// `r^p e^{ikθ} = ζ^{(p+k)/2} ζ̄^{(p−k)/2}`.
fn monomial_of_polar(p: usize, k: i64) -> (usize, usize) {
    let m = (p as i64 + k) / 2;
    let l = (p as i64 - k) / 2;
    (m as usize, l as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgreen::ops::inner_product;

    #[test]
    fn moment_formula_matches_coefficients() {
        for n in 0..12 {
            for m in (n % 2..=n).step_by(2) {
                for q in 0..20 {
                    let direct: f64 = zernike_radial(n, m)
                        .iter()
                        .map(|&(p, c)| c / (q + p + 2) as f64)
                        .sum();
                    assert!((direct - zernike_moment(q, n, m)).abs() < 1e-10, "{q} {n} {m}");
                }
            }
        }
    }

    #[test]
    fn basis_is_orthonormal() {
        let b = DiscBasis::new(10);
        let els: Vec<_> = (0..b.dim()).map(|i| b.element(i)).collect();
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                let g = inner_product(&els[i], &els[j], true).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - C64::new(want, 0.0)).norm() < 1e-9, "({i},{j}) -> {g}");
            }
        }
    }

    #[test]
    fn only_center_slot_is_nonzero_at_origin() {
        let b = DiscBasis::new(8);
        for i in 1..b.dim() {
            assert!(b.element(i).eval(C64::new(0.0, 0.0))[0].norm() < 1e-12);
        }
        let e0 = b.element(0).eval(C64::new(0.0, 0.0))[0];
        assert!((e0.re - b.center_norm()).abs() < 1e-10);
    }

    #[test]
    fn coordinate_round_trip() {
        let b = DiscBasis::new(6);
        let f = SpectralField::from_components(&[
            SpectralField::scalar_from_terms(&[(2, 1, C64::new(1.0, -2.0)), (0, 0, C64::new(0.5, 0.0))]),
            SpectralField::scalar_from_terms(&[(0, 6, C64::new(0.0, 1.0)), (3, 3, C64::new(2.0, 0.0))]),
        ]);
        let back = b.from_real(2, &b.to_real(&f, false));
        assert!((&back - &f).max_abs_coeff() < 1e-10);
    }

    #[test]
    fn dropping_center_keeps_origin_value_zero() {
        let b = DiscBasis::new(8);
        let f = SpectralField::scalar_from_terms(&[(5, 5, C64::new(1.0, 0.0)), (0, 0, C64::new(2.0, 0.0))]);
        let p = b.project(&f, true);
        assert!(p.eval(C64::new(0.0, 0.0))[0].norm() < 1e-10);
    }
}
