//! The Cauchy–Green transform, complex derivatives and `L²` pairings in
//! coefficient space, plus an independent singular-quadrature oracle.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::field::{mono_of, monomial_integral, SpectralField};
use super::grid::gauss_legendre_unit;
use crate::error::{Error, Result};

/// Hard cap on the total degree of any coefficient field.
pub const MAX_DEGREE: usize = 128;

/// Which complex derivative to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivative {
    Zeta,
    ZetaBar,
}

/// `Tu(ζ) = (1/2πi)∫ u(ω) dω∧dω̄ /(ω−ζ)`, computed by the monomial rule
/// `T(ζᵐζ̄ˡ) = (ζᵐζ̄^{l+1} − [m ≥ l+1] ζ^{m−l−1})/(l+1)`.
/// With `centered`, returns `T₀u = Tu − Tu(0)`.
pub fn cauchy_green(u: &SpectralField, centered: bool) -> Result<SpectralField> {
    let degree = u.degree() + 1;
    if degree > MAX_DEGREE {
        return Err(Error::DegreeOverflow {
            degree,
            limit: MAX_DEGREE,
        });
    }
    let mut out = SpectralField::zeros(u.ncomp(), degree);
    for (c, m, l, v) in u.terms() {
        let s = v / (l + 1) as f64;
        out.add_at(c, m, l + 1, s);
        if m > l {
            out.add_at(c, m - l - 1, 0, -s);
        }
    }
    if centered {
        for c in 0..u.ncomp() {
            out.set(c, 0, 0, C64::new(0.0, 0.0));
        }
    }
    Ok(out)
}

/// Exact `∂_ζ` or `∂_ζ̄` on the monomial basis.
pub fn complex_derivative(u: &SpectralField, which: Derivative) -> SpectralField {
    let mut out = SpectralField::zeros(u.ncomp(), u.degree().saturating_sub(1));
    for (c, m, l, v) in u.terms() {
        match which {
            Derivative::Zeta if m > 0 => out.add_at(c, m - 1, l, v * m as f64),
            Derivative::ZetaBar if l > 0 => out.add_at(c, m, l - 1, v * l as f64),
            _ => {}
        }
    }
    out
}

/// `j`-fold `∂_ζ`.
pub fn zeta_derivative_n(u: &SpectralField, j: usize) -> SpectralField {
    (0..j).fold(u.clone(), |f, _| complex_derivative(&f, Derivative::Zeta))
}

fn pairing(u: &[C64], v: &[C64], conjugate_second: bool) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (i, a) in u.iter().enumerate().filter(|(_, a)| a.norm_sqr() > 0.0) {
        let (m1, l1) = mono_of(i);
        for (j, b) in v.iter().enumerate().filter(|(_, b)| b.norm_sqr() > 0.0) {
            let (m2, l2) = mono_of(j);
            let (b, pa, pb) = if conjugate_second {
                (b.conj(), m1 + l2, l1 + m2)
            } else {
                (*b, m1 + m2, l1 + l2)
            };
            if pa == pb {
                acc += a * b * monomial_integral(pa, pb);
            }
        }
    }
    acc
}

/// With `conjugate_second`, the `L²` inner product `(u,v) = Σ_j ∫ u_j v̄_j dA`.
/// Otherwise the bilinear pairing `S_v u = (1/2πi) ∫ Σ_j v_j u_j dζ∧dζ̄
/// = −(1/π) ∫ Σ_j u_j v_j dA`.
pub fn inner_product(u: &SpectralField, v: &SpectralField, conjugate_second: bool) -> Result<C64> {
    if u.ncomp() != v.ncomp() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {} components",
            u.ncomp(),
            v.ncomp()
        )));
    }
    let s: C64 = (0..u.ncomp())
        .map(|c| pairing(u.comp(c), v.comp(c), conjugate_second))
        .sum();
    Ok(if conjugate_second { s } else { -s / PI })
}

/// Real part of the `L²` inner product.
pub fn real_inner(u: &SpectralField, v: &SpectralField) -> f64 {
    inner_product(u, v, true).expect("component counts match").re
}

/// Angular node count of the oracle.
const ORACLE_N_ALPHA: usize = 256;
/// Radial node count of the oracle.
const ORACLE_N_RHO: usize = 24;

/// Evaluates `Tu(ζ)` by direct area quadrature, independent of
/// [`cauchy_green`]. The kernel is integrated in polar coordinates centered at
/// `ζ`, where `dA/(ω−ζ) = e^{−iα} dρ dα` is bounded, after subtracting `u(ζ)`
/// whose contribution is the closed form `u(ζ)·ζ̄`.
pub fn cg_quadrature_oracle(u: impl Fn(C64) -> C64, zeta: C64) -> C64 {
    assert!(zeta.norm() < 1.0, "oracle needs an interior point");
    let (rho_nodes, rho_weights) = gauss_legendre_unit(ORACLE_N_RHO);
    let u0 = u(zeta);
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..ORACLE_N_ALPHA {
        let alpha = 2.0 * PI * j as f64 / ORACLE_N_ALPHA as f64;
        let dir = C64::from_polar(1.0, alpha);
        let proj = (zeta.conj() * dir).re;
        let reach = -proj + (proj * proj + 1.0 - zeta.norm_sqr()).sqrt();
        let mut inner = C64::new(0.0, 0.0);
        for (x, w) in rho_nodes.iter().zip(&rho_weights) {
            let rho = x * reach;
            inner += (u(zeta + dir * rho) - u0) * (w * reach);
        }
        acc += inner * dir.conj();
    }
    let dalpha = 2.0 * PI / ORACLE_N_ALPHA as f64;
    -acc * dalpha / PI + u0 * zeta.conj()
}
