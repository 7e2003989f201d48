use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cgreen::{DiscBasis, HolomorphicDatum, SpectralField};
use crate::error::{Error, Result};

use super::discrete::DiscretizedOperator;

/// One correction `ε·e_c ζᵐ/‖ζᵐ‖`, optionally times `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionChoice {
    pub basis_index: usize,
    pub degree: usize,
    pub imaginary: bool,
    pub scale: f64,
}

/// Rank-one corrections making `P̃u = Pu + Σ_j Re(u, w_j) p_j` injective.
/// Every `p_j` is holomorphic with `p_j(0) = 0` and `‖p_j‖ = ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct FredholmModification {
    kernel: Vec<SpectralField>,
    corrections: Vec<HolomorphicDatum>,
    choices: Vec<CorrectionChoice>,
    eps: f64,
}

/// Serializable summary of kernel detection and the chosen corrections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModificationReport {
    pub d: usize,
    pub singular_values: Vec<f64>,
    pub corrections: Vec<CorrectionChoice>,
}

impl FredholmModification {
    pub fn empty() -> Self {
        Self {
            kernel: Vec::new(),
            corrections: Vec::new(),
            choices: Vec::new(),
            eps: 0.0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.kernel.is_empty()
    }

    pub fn d(&self) -> usize {
        self.kernel.len()
    }

    pub fn kernel(&self) -> &[SpectralField] {
        &self.kernel
    }

    pub fn corrections(&self) -> &[HolomorphicDatum] {
        &self.corrections
    }

    pub fn choices(&self) -> &[CorrectionChoice] {
        &self.choices
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Same kernel with every `p_j` replaced by `−p_j`.
    pub fn negated(&self) -> Self {
        Self {
            corrections: self.corrections.iter().map(|p| p.scale(C64::new(-1.0, 0.0))).collect(),
            ..self.clone()
        }
    }

    /// `Σ_j p_j w_jᵀ` in real basis coordinates.
    pub fn correction_matrix(&self, basis: &DiscBasis, n: usize) -> DMatrix<f64> {
        let size = 2 * n * basis.dim();
        let mut m = DMatrix::zeros(size, size);
        for (w, p) in self.kernel.iter().zip(&self.corrections) {
            let wr = basis.to_real(w, false);
            let pr = basis.to_real(&p.to_field(), false);
            m += pr * wr.transpose();
        }
        m
    }

    pub fn report(&self, singular_values: &[f64]) -> ModificationReport {
        ModificationReport {
            d: self.d(),
            singular_values: singular_values.to_vec(),
            corrections: self.choices.clone(),
        }
    }
}

/// Default correction size, `1e−3·‖P‖`.
pub fn default_eps(op: &DiscretizedOperator) -> f64 {
    1e-3 * op.norm()
}

fn candidate(n: usize, c: usize, m: usize, imaginary: bool, eps: f64) -> HolomorphicDatum {
    // ‖ζᵐ‖² = π/(m+1)
    let s = eps * ((m + 1) as f64 / std::f64::consts::PI).sqrt();
    let mut taylor = vec![vec![C64::new(0.0, 0.0); n]; m + 1];
    taylor[m][c] = if imaginary { C64::new(0.0, s) } else { C64::new(s, 0.0) };
    HolomorphicDatum::new(taylor)
}

fn sigma_min_cols(cols: &[DVector<f64>]) -> f64 {
    let m = DMatrix::from_columns(cols);
    m.svd(false, false).singular_values.min()
}

/// Greedily picks `d = kernel.len()` corrections among `e_c ζᵐ`, `i·e_c ζᵐ`,
/// `1 ≤ m ≤ N`, each maximizing the smallest singular value of the overlap of
/// the chosen corrections with the left singular vectors of the deficient
/// directions. The result is verified on the full modified matrix.
pub fn build_modification(
    op: &DiscretizedOperator,
    kernel: &[SpectralField],
    eps: f64,
    svd_tol: f64,
) -> Result<FredholmModification> {
    let d = kernel.len();
    if d == 0 {
        return Ok(FredholmModification::empty());
    }
    let n = op.n();
    let basis = op.basis();
    let svd = op.matrix().clone().svd(true, false);
    let u = svd.u.as_ref().expect("requested U");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let left: Vec<DVector<f64>> = order[..d].iter().map(|&i| u.column(i).into_owned()).collect();

    let mut pool = Vec::new();
    for c in 0..n {
        for m in 1..=op.degree() {
            for imaginary in [false, true] {
                let p = candidate(n, c, m, imaginary, 1.0);
                let pr = basis.to_real(&p.to_field(), false);
                let overlap = DVector::from_iterator(d, left.iter().map(|l| l.dot(&pr)));
                pool.push(((c, m, imaginary), overlap));
            }
        }
    }

    let mut chosen: Vec<usize> = Vec::new();
    for _ in 0..d {
        let mut best: Option<(usize, f64)> = None;
        for (k, (_, ov)) in pool.iter().enumerate() {
            if chosen.contains(&k) {
                continue;
            }
            let mut cols: Vec<DVector<f64>> = chosen.iter().map(|&j| pool[j].1.clone()).collect();
            cols.push(ov.clone());
            let s = sigma_min_cols(&cols);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((k, s));
            }
        }
        match best {
            Some((k, _)) => chosen.push(k),
            None => {
                return Err(Error::ComplementNotFound {
                    remaining: d - chosen.len(),
                })
            }
        }
    }

    let mut corrections = Vec::with_capacity(d);
    let mut choices = Vec::with_capacity(d);
    for &k in &chosen {
        let (c, m, imaginary) = pool[k].0;
        corrections.push(candidate(n, c, m, imaginary, eps));
        choices.push(CorrectionChoice {
            basis_index: c,
            degree: m,
            imaginary,
            scale: eps,
        });
    }
    let modification = FredholmModification {
        kernel: kernel.to_vec(),
        corrections,
        choices,
        eps,
    };

    let modified = op.modified(&modification);
    let sv = modified.singular_values();
    let floor = svd_tol * sv.max();
    let remaining = sv.iter().filter(|s| **s < floor).count();
    if remaining > 0 {
        return Err(Error::ComplementNotFound { remaining });
    }
    Ok(modification)
}
