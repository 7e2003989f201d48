use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::cgreen::{cauchy_green, DiscBasis, SpectralField};
use crate::error::Result;

use super::modification::FredholmModification;
use super::system::LinearCRSystem;

/// Real matrix of `u ↦ u − Π T₀(B₁u + B₂ū + A_base·conj(u_ζ))` on the real
/// coordinates of `V_N ⊗ ℂⁿ` in the orthonormal [`DiscBasis`], plus any rank-one
/// corrections. `Π` is the orthogonal projection onto fields vanishing at the
/// origin, so the center coordinate of the image is always that of `u`.
/// With `centered = false`, `T` replaces `T₀` and `Π` is the full projection.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    n: usize,
    basis: DiscBasis,
    matrix: DMatrix<f64>,
    centered: bool,
    modified: bool,
}

impl DiscretizedOperator {
    pub fn assemble(sys: &LinearCRSystem, degree: usize) -> Result<Self> {
        Self::assemble_with(sys, DiscBasis::new(degree), true)
    }

    pub fn assemble_with(sys: &LinearCRSystem, basis: DiscBasis, centered: bool) -> Result<Self> {
        let n = sys.n();
        let dim = basis.dim();
        let size = 2 * n * dim;
        let mut matrix = DMatrix::identity(size, size);
        let elements: Vec<SpectralField> = (0..dim).map(|i| basis.element(i)).collect();
        for c in 0..n {
            for (i, el) in elements.iter().enumerate() {
                for part in 0..2 {
                    let scale = if part == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 1.0) };
                    let mut comps = vec![SpectralField::zeros(1, 0); n];
                    comps[c] = el.scale(scale);
                    let u = SpectralField::from_components(&comps);
                    let t = cauchy_green(&sys.rhs_terms(&u), centered)?;
                    let img = basis.to_real(&t, centered);
                    let col = 2 * (c * dim + i) + part;
                    let mut dst = matrix.column_mut(col);
                    dst -= &img;
                }
            }
        }
        Ok(Self {
            n,
            basis,
            matrix,
            centered,
            modified: false,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &DiscBasis {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn is_modified(&self) -> bool {
        self.modified
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn to_real(&self, u: &SpectralField) -> DVector<f64> {
        self.basis.to_real(u, false)
    }

    pub fn from_real(&self, x: &DVector<f64>) -> SpectralField {
        self.basis.from_real(self.n, x)
    }

    /// Projects `u` onto `V_N` and applies the matrix.
    pub fn apply(&self, u: &SpectralField) -> SpectralField {
        self.from_real(&(&self.matrix * self.to_real(u)))
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> DVector<f64> {
        let mut s = self.matrix.clone().svd(false, false).singular_values;
        s.as_mut_slice().sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values().min()
    }

    /// Operator norm on `V_N`.
    pub fn norm(&self) -> f64 {
        self.singular_values().max()
    }

    /// `P̃ = P + Σ_j p_j Re(·, w_j)`.
    pub fn modified(&self, m: &FredholmModification) -> Self {
        let mut out = self.clone();
        out.matrix += m.correction_matrix(&self.basis, self.n);
        out.modified = !m.is_empty();
        out
    }

    /// Replaces the matrix; used to build deliberately deficient operators.
    pub fn with_matrix(&self, matrix: DMatrix<f64>) -> Self {
        assert_eq!(matrix.shape(), self.matrix.shape());
        Self {
            matrix,
            ..self.clone()
        }
    }
}

/// Orthonormal basis of the numerical kernel: right singular vectors whose
/// singular value is below `svd_tol` relative to the largest one.
pub fn kernel_basis(op: &DiscretizedOperator, svd_tol: f64) -> (Vec<SpectralField>, DVector<f64>) {
    let (vecs, sv) = kernel_vectors(op, svd_tol);
    let fields = vecs.iter().map(|v| op.from_real(v)).collect();
    (fields, sv)
}

/// Real kernel vectors and all singular values (descending).
pub(crate) fn kernel_vectors(op: &DiscretizedOperator, svd_tol: f64) -> (Vec<DVector<f64>>, DVector<f64>) {
    let svd = op.matrix().clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V");
    let smax = svd.singular_values.max();
    let mut kernel = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s < svd_tol * smax {
            kernel.push(v_t.row(i).transpose());
        }
    }
    // re-orthonormalize with a QR pass
    if !kernel.is_empty() {
        let m = DMatrix::from_columns(&kernel);
        let q = m.qr().q();
        kernel = (0..kernel.len()).map(|j| q.column(j).into_owned()).collect();
    }
    let mut sv = svd.singular_values;
    sv.as_mut_slice().sort_by(|a, b| b.total_cmp(a));
    (kernel, sv)
}
