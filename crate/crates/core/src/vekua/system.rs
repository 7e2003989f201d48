use num_complex::Complex64 as C64;

use crate::cgreen::{
    cauchy_green, complex_derivative, inner_product, synthesize, Derivative, DiscGrid, GridValues,
    SpectralField,
};
use crate::error::{Error, Result};

use super::modification::FredholmModification;

/// The linear system `u_ζ̄ = B₁u + B₂ū + A_base·conj(u_ζ)` for `u: 𝔻 → ℂⁿ`.
/// Matrices are row-major lists of scalar fields.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCRSystem {
    n: usize,
    b1: Vec<SpectralField>,
    b2: Vec<SpectralField>,
    a_base: Option<Vec<SpectralField>>,
}

fn check_matrix(n: usize, m: &[SpectralField], name: &str) -> Result<()> {
    if m.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "{name} has {} entries, expected {}",
            m.len(),
            n * n
        )));
    }
    if m.iter().any(|f| f.ncomp() != 1) {
        return Err(Error::DimensionMismatch(format!("{name} entries must be scalar fields")));
    }
    Ok(())
}

fn zero_matrix(n: usize) -> Vec<SpectralField> {
    vec![SpectralField::zeros(1, 0); n * n]
}

/// `(M u)_k = Σ_j M_kj u_j`.
fn mat_apply(n: usize, m: &[SpectralField], u: &SpectralField) -> SpectralField {
    let parts: Vec<SpectralField> = (0..n)
        .map(|k| {
            let mut acc = SpectralField::zeros(1, 0);
            for j in 0..n {
                let e = &m[k * n + j];
                if e.max_abs_coeff() == 0.0 {
                    continue;
                }
                acc = &acc + &e.mul_scalar(&u.component(j));
            }
            acc
        })
        .collect();
    SpectralField::from_components(&parts)
}

impl LinearCRSystem {
    pub fn new(n: usize, b1: Vec<SpectralField>, b2: Vec<SpectralField>) -> Result<Self> {
        check_matrix(n, &b1, "B1")?;
        check_matrix(n, &b2, "B2")?;
        Ok(Self {
            n,
            b1,
            b2,
            a_base: None,
        })
    }

    /// `u_ζ̄ = 0`.
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            b1: zero_matrix(n),
            b2: zero_matrix(n),
            a_base: None,
        }
    }

    /// Scalar system `u_ζ̄ = b₁u + b₂ū`.
    pub fn scalar(b1: SpectralField, b2: SpectralField) -> Self {
        Self::new(1, vec![b1], vec![b2]).expect("scalar fields")
    }

    pub fn with_a_base(mut self, a: Vec<SpectralField>) -> Result<Self> {
        check_matrix(self.n, &a, "A_base")?;
        self.a_base = if a.iter().all(|f| f.max_abs_coeff() == 0.0) {
            None
        } else {
            Some(a)
        };
        Ok(self)
    }

    /// Direct sum of systems.
    pub fn block_diagonal(blocks: &[LinearCRSystem]) -> Self {
        let n: usize = blocks.iter().map(|b| b.n).sum();
        let mut b1 = zero_matrix(n);
        let mut b2 = zero_matrix(n);
        let mut a = zero_matrix(n);
        let mut off = 0;
        for blk in blocks {
            for i in 0..blk.n {
                for j in 0..blk.n {
                    b1[(off + i) * n + off + j] = blk.b1[i * blk.n + j].clone();
                    b2[(off + i) * n + off + j] = blk.b2[i * blk.n + j].clone();
                    if let Some(ab) = &blk.a_base {
                        a[(off + i) * n + off + j] = ab[i * blk.n + j].clone();
                    }
                }
            }
            off += blk.n;
        }
        Self::new(n, b1, b2)
            .and_then(|s| s.with_a_base(a))
            .expect("block sizes are consistent")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b1(&self) -> &[SpectralField] {
        &self.b1
    }

    pub fn b2(&self) -> &[SpectralField] {
        &self.b2
    }

    pub fn a_base(&self) -> Option<&[SpectralField]> {
        self.a_base.as_deref()
    }

    pub fn has_a_base(&self) -> bool {
        self.a_base.is_some()
    }

    /// Replaces `B₂` (used for the unimodular twist).
    pub fn with_b2(&self, b2: Vec<SpectralField>) -> Result<Self> {
        check_matrix(self.n, &b2, "B2")?;
        Ok(Self {
            b2,
            ..self.clone()
        })
    }

    /// Largest coefficient degree among the entries.
    pub fn coefficient_degree(&self) -> usize {
        let all = self.b1.iter().chain(&self.b2).chain(self.a_base.iter().flatten());
        all.map(|f| f.effective_degree(0.0)).max().unwrap_or(0)
    }

    /// `B₁u + B₂ū + A_base·conj(u_ζ)`.
    pub fn rhs_terms(&self, u: &SpectralField) -> SpectralField {
        assert_eq!(u.ncomp(), self.n, "component count mismatch");
        let mut out = &mat_apply(self.n, &self.b1, u) + &mat_apply(self.n, &self.b2, &u.conj());
        if let Some(a) = &self.a_base {
            let du = complex_derivative(u, Derivative::Zeta).conj();
            out = &out + &mat_apply(self.n, a, &du);
        }
        out
    }

    /// `u_ζ̄ − B₁u − B₂ū − A_base·conj(u_ζ) − ψ`, exact in coefficient space.
    pub fn residual(&self, u: &SpectralField, psi: Option<&SpectralField>) -> SpectralField {
        let mut r = &complex_derivative(u, Derivative::ZetaBar) - &self.rhs_terms(u);
        if let Some(psi) = psi {
            r = &r - psi;
        }
        r
    }
}

/// Which operator [`apply_operator`] evaluates.
#[derive(Debug, Clone, Copy)]
pub enum OperatorMode<'a> {
    /// `Pu = u − T₀(B₁u + B₂ū + A_base·conj(u_ζ))`.
    P,
    /// `P̃u = Pu + Σ_j Re(u, w_j) p_j`.
    PTilde(&'a FredholmModification),
}

/// Exact (unprojected) action of `P` or `P̃`.
pub fn apply_operator(sys: &LinearCRSystem, u: &SpectralField, mode: OperatorMode<'_>) -> Result<SpectralField> {
    let mut out = u - &cauchy_green(&sys.rhs_terms(u), true)?;
    if let OperatorMode::PTilde(m) = mode {
        for (w, p) in m.kernel().iter().zip(m.corrections()) {
            let s = inner_product(u, w, true)?.re;
            out = &out + &p.to_field().scale(C64::new(s, 0.0));
        }
    }
    Ok(out)
}

/// `P*v = v + ζ̄⁻¹B₁*T̄(ζ̄v) + ζ⁻¹B₂ᵀT(ζv̄)` on the grid, adjoint to `P` for
/// the real pairing `Re(·,·)`. Both correction terms share `f = T(ζv̄)`, since
/// `T̄(ζ̄v) = conj f`.
pub fn apply_adjoint(sys: &LinearCRSystem, v: &SpectralField, grid: &DiscGrid) -> Result<GridValues> {
    if sys.has_a_base() {
        return Err(Error::ModeMismatch(
            "adjoint is only available for systems without a Beltrami term".into(),
        ));
    }
    let n = sys.n();
    let f = cauchy_green(&v.conj().shift_zeta(1), false)?;
    let fv = synthesize(&f, grid);
    let vv = synthesize(v, grid);
    let b1: Vec<GridValues> = sys.b1.iter().map(|b| synthesize(b, grid)).collect();
    let b2: Vec<GridValues> = sys.b2.iter().map(|b| synthesize(b, grid)).collect();
    let mut out = vv.clone();
    for p in 0..grid.len() {
        let z = grid.point(p);
        for k in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                // (B₁*)_kj = conj(B₁_jk), (B₂ᵀ)_kj = B₂_jk
                acc += b1[j * n + k].at(0, p).conj() * fv.at(j, p).conj() / z.conj();
                acc += b2[j * n + k].at(0, p) * fv.at(j, p) / z;
            }
            out.comp_mut(k)[p] += acc;
        }
    }
    Ok(out)
}
