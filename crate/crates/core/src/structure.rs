//! Almost complex structures on domains of `ℂⁿ`, their complex matrices, and
//! the integrability test.
//!
//! A real-linear operator `J` on `ℂⁿ` is written `u ↦ Lu + M ū`. Away from the
//! locus `det(J_st + J) = 0` it is encoded by the complex matrix `A` with
//! `A v = Q v̄`, `Q = (J_st + J)⁻¹(J_st − J)`; the inverse map is
//! `J u = i (I − AĀ)⁻¹ [(I + AĀ) u − 2 A ū]`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{PolyTermJson, PolynomialMap, Var};

/// Relative tolerance for the determinant and `J² = −I` checks.
pub const STRUCTURE_TOL: f64 = 1e-8;

const I: C64 = C64::new(0.0, 1.0);

/// `u ↦ L u + M ū` on `ℂⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealLinearOp {
    pub linear: DMatrix<C64>,
    pub antilinear: DMatrix<C64>,
}

impl RealLinearOp {
    pub fn new(linear: DMatrix<C64>, antilinear: DMatrix<C64>) -> Self {
        assert_eq!(linear.shape(), antilinear.shape());
        assert!(linear.is_square());
        Self { linear, antilinear }
    }

    pub fn dim(&self) -> usize {
        self.linear.nrows()
    }

    /// The standard structure `J_st u = i u`.
    pub fn standard(n: usize) -> Self {
        Self::new(
            DMatrix::identity(n, n) * I,
            DMatrix::zeros(n, n),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n), DMatrix::zeros(n, n))
    }

    pub fn apply(&self, u: &[C64]) -> Vec<C64> {
        let n = self.dim();
        (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| self.linear[(r, c)] * u[c] + self.antilinear[(r, c)] * u[c].conj())
                    .sum()
            })
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let l = &self.linear * &other.linear + &self.antilinear * other.antilinear.map(|x| x.conj());
        let m = &self.linear * &other.antilinear + &self.antilinear * other.linear.map(|x| x.conj());
        Self::new(l, m)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.linear + &other.linear, &self.antilinear + &other.antilinear)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(&self.linear - &other.linear, &self.antilinear - &other.antilinear)
    }

    /// The `2n × 2n` real matrix acting on `(Re u, Im u)`.
    pub fn to_real(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut r = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let l = self.linear[(i, j)];
                let m = self.antilinear[(i, j)];
                r[(i, j)] = l.re + m.re;
                r[(i, n + j)] = m.im - l.im;
                r[(n + i, j)] = l.im + m.im;
                r[(n + i, n + j)] = l.re - m.re;
            }
        }
        r
    }

    pub fn from_real(r: &DMatrix<f64>) -> Self {
        assert!(r.is_square() && r.nrows().is_multiple_of(2));
        let n = r.nrows() / 2;
        let mut l = DMatrix::zeros(n, n);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let (r11, r12, r21, r22) =
                    (r[(i, j)], r[(i, n + j)], r[(n + i, j)], r[(n + i, n + j)]);
                l[(i, j)] = C64::new((r11 + r22) / 2.0, (r21 - r12) / 2.0);
                m[(i, j)] = C64::new((r11 - r22) / 2.0, (r21 + r12) / 2.0);
            }
        }
        Self::new(l, m)
    }

    /// Frobenius norm of `J∘J + I`.
    pub fn square_defect(&self) -> f64 {
        let sq = self.compose(self).add(&Self::identity(self.dim()));
        (sq.linear.norm_squared() + sq.antilinear.norm_squared()).sqrt()
    }

    pub fn norm(&self) -> f64 {
        (self.linear.norm_squared() + self.antilinear.norm_squared()).sqrt()
    }
}

fn conj_mat(a: &DMatrix<C64>) -> DMatrix<C64> {
    a.map(|x| x.conj())
}

/// The anti-linear operator `Q = (J_st + J)⁻¹(J_st − J)`.
pub(crate) fn transient_q(j: &RealLinearOp) -> Result<RealLinearOp> {
    let n = j.dim();
    let jst = RealLinearOp::standard(n);
    let plus = jst.add(j).to_real();
    let scale = plus.abs().max().max(1.0);
    let det = plus.determinant();
    let tol = STRUCTURE_TOL * scale.powi(2 * n as i32);
    if det.abs() < tol {
        return Err(Error::SingularStructure { det, tol });
    }
    let inv = plus
        .try_inverse()
        .ok_or(Error::SingularStructure { det, tol })?;
    Ok(RealLinearOp::from_real(&(inv * jst.sub(j).to_real())))
}

/// Complex matrix `A` of a complex structure `J`.
pub fn a_from_j(j: &RealLinearOp) -> Result<DMatrix<C64>> {
    let defect = j.square_defect();
    if defect > STRUCTURE_TOL * (1.0 + j.norm().powi(2)) {
        return Err(Error::NotAComplexStructure { defect });
    }
    // Q(v̄) = A v, so A is the anti-linear part of Q.
    Ok(transient_q(j)?.antilinear)
}

/// The structure `J` with complex matrix `A`.
pub fn j_from_a(a: &DMatrix<C64>) -> Result<RealLinearOp> {
    assert!(a.is_square());
    let n = a.nrows();
    let id = DMatrix::<C64>::identity(n, n);
    let aa = a * conj_mat(a);
    let minus = &id - &aa;
    let det = minus.determinant().norm();
    if det < STRUCTURE_TOL {
        return Err(Error::SingularStructure {
            det,
            tol: STRUCTURE_TOL,
        });
    }
    let inv = minus.try_inverse().ok_or(Error::SingularStructure {
        det,
        tol: STRUCTURE_TOL,
    })?;
    let linear = (&inv * (&id + &aa)) * I;
    let antilinear = (&inv * a) * (I * -2.0);
    Ok(RealLinearOp::new(linear, antilinear))
}

/// An almost complex structure on a ball in `ℂⁿ` given by polynomial `A`,
/// with the affine term `b` of the disc equation `g_ζ̄ = A(g) ḡ_ζ̄ + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureChart {
    n: usize,
    a: Vec<PolynomialMap>,
    b: Vec<PolynomialMap>,
    radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureJson {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Vec<PolyTermJson>>>,
    #[serde(default)]
    pub b: Vec<Vec<PolyTermJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl StructureChart {
    /// Builds the chart and checks `det(I − AĀ) ≠ 0` over the validity lattice.
    pub fn new(n: usize, a: Vec<PolynomialMap>, b: Vec<PolynomialMap>, radius: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch("n must be positive".into()));
        }
        if a.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "A has {} entries, expected {}",
                a.len(),
                n * n
            )));
        }
        let b = if b.is_empty() {
            vec![PolynomialMap::zero(n); n]
        } else {
            b
        };
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "b has {} entries, expected {n}",
                b.len()
            )));
        }
        if a.iter().chain(&b).any(|p| p.num_vars_z() != n) {
            return Err(Error::DimensionMismatch("polynomial arity differs from n".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Schema(format!("invalid radius {radius}")));
        }
        let chart = Self { n, a, b, radius };
        chart.check_validity()?;
        Ok(chart)
    }

    /// Constant structure matrix, `b = 0`.
    pub fn constant(a: &DMatrix<C64>) -> Result<Self> {
        let n = a.nrows();
        let entries = (0..n * n)
            .map(|k| PolynomialMap::constant(n, a[(k / n, k % n)]))
            .collect();
        Self::new(n, entries, vec![], 1.0)
    }

    /// The standard structure `A = 0`.
    pub fn standard(n: usize) -> Self {
        Self {
            n,
            a: vec![PolynomialMap::zero(n); n * n],
            b: vec![PolynomialMap::zero(n); n],
            radius: 1.0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn a_entry(&self, row: usize, col: usize) -> &PolynomialMap {
        &self.a[row * self.n + col]
    }

    pub fn b_entry(&self, k: usize) -> &PolynomialMap {
        &self.b[k]
    }

    /// `(A, b)` are independent of `z`, so validity holds on all of `ℂⁿ`.
    pub fn is_independent_of_z(&self) -> bool {
        self.a.iter().chain(&self.b).all(|p| p.is_independent_of_z())
    }

    fn depends_on_zeta(&self) -> bool {
        self.a.iter().any(|p| p.zeta_degree() > 0)
    }

    pub fn a_at(&self, zeta: C64, z: &[C64]) -> DMatrix<C64> {
        DMatrix::from_fn(self.n, self.n, |r, c| self.a[r * self.n + c].eval(zeta, z))
    }

    pub fn b_at(&self, zeta: C64, z: &[C64]) -> Vec<C64> {
        self.b.iter().map(|p| p.eval(zeta, z)).collect()
    }

    /// Scales `(A, b)` by `t`, used by continuation.
    pub fn scaled(&self, t: f64) -> Self {
        let s = C64::new(t, 0.0);
        Self {
            n: self.n,
            a: self.a.iter().map(|p| p.scale(s)).collect(),
            b: self.b.iter().map(|p| p.scale(s)).collect(),
            radius: self.radius,
        }
    }

    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        self.radius = radius;
        self.check_validity()?;
        Ok(self)
    }

    /// Lattice of `5ⁿ` points in the ball of radius `R`: each coordinate takes
    /// values in `{0, ±r, ±ir}` with `r = R/√n`.
    pub fn validity_lattice(&self) -> Vec<Vec<C64>> {
        let r = self.radius / (self.n as f64).sqrt();
        let vals = [
            C64::new(0.0, 0.0),
            C64::new(r, 0.0),
            C64::new(-r, 0.0),
            C64::new(0.0, r),
            C64::new(0.0, -r),
        ];
        let mut pts = vec![vec![]];
        for _ in 0..self.n {
            pts = pts
                .into_iter()
                .flat_map(|p: Vec<C64>| {
                    vals.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        pts
    }

    fn check_validity(&self) -> Result<()> {
        let zetas: Vec<C64> = if self.depends_on_zeta() {
            vec![
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(-1.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, -1.0),
            ]
        } else {
            vec![C64::new(0.0, 0.0)]
        };
        let id = DMatrix::<C64>::identity(self.n, self.n);
        for zeta in zetas {
            for z in self.validity_lattice() {
                let a = self.a_at(zeta, &z);
                let det = (&id - &a * conj_mat(&a)).determinant().norm();
                if det.is_nan() || det < STRUCTURE_TOL {
                    return Err(Error::SingularStructure {
                        det,
                        tol: STRUCTURE_TOL,
                    });
                }
            }
        }
        Ok(())
    }

    /// Fails with `OutOfValidityRegion` when `z` leaves the ball, unless the
    /// structure does not depend on `z`.
    pub fn check_point(&self, z: &[C64]) -> Result<()> {
        if self.is_independent_of_z() {
            return Ok(());
        }
        let norm = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > self.radius * (1.0 + 1e-12) {
            return Err(Error::OutOfValidityRegion {
                norm,
                radius: self.radius,
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> StructureJson {
        StructureJson {
            n: self.n,
            a: (0..self.n)
                .map(|r| (0..self.n).map(|c| self.a_entry(r, c).to_json_terms()).collect())
                .collect(),
            b: self.b.iter().map(|p| p.to_json_terms()).collect(),
            radius: Some(self.radius),
        }
    }

    pub fn from_json(j: &StructureJson) -> Result<Self> {
        let n = j.n;
        if j.a.len() != n || j.a.iter().any(|row| row.len() != n) {
            return Err(Error::Schema(format!("\"A\" must be a {n}x{n} array")));
        }
        let a = j
            .a
            .iter()
            .flatten()
            .map(|terms| PolynomialMap::from_json_terms(n, terms))
            .collect::<Result<Vec<_>>>()?;
        if !j.b.is_empty() && j.b.len() != n {
            return Err(Error::Schema(format!("\"b\" must have {n} entries")));
        }
        let b = j
            .b
            .iter()
            .map(|terms| PolynomialMap::from_json_terms(n, terms))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, a, b, j.radius.unwrap_or(1.0))
    }
}

/// The tensor `N_{jkl} = (a_{jk})_{z̄_l} + Σ_s (a_{jk})_{z_s} a_{sl}` at a point.
#[derive(Debug, Clone)]
pub struct NijenhuisReport {
    pub n: usize,
    /// Row-major `N[j][k][l]`.
    pub tensor: Vec<C64>,
    pub max_asymmetry: f64,
    pub integrable: bool,
}

impl NijenhuisReport {
    pub fn get(&self, j: usize, k: usize, l: usize) -> C64 {
        self.tensor[(j * self.n + k) * self.n + l]
    }
}

pub fn nijenhuis_tensor(chart: &StructureChart, zeta: C64, z: &[C64], tol: f64) -> NijenhuisReport {
    let n = chart.n();
    let a = chart.a_at(zeta, z);
    let mut tensor = vec![C64::new(0.0, 0.0); n * n * n];
    for j in 0..n {
        for k in 0..n {
            let ajk = chart.a_entry(j, k);
            let dz: Vec<C64> = (0..n).map(|s| ajk.partial(Var::Z(s)).eval(zeta, z)).collect();
            for l in 0..n {
                let mut v = ajk.partial(Var::ZBar(l)).eval(zeta, z);
                for s in 0..n {
                    v += dz[s] * a[(s, l)];
                }
                tensor[(j * n + k) * n + l] = v;
            }
        }
    }
    let mut max_asymmetry: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                let d = tensor[(j * n + k) * n + l] - tensor[(j * n + l) * n + k];
                max_asymmetry = max_asymmetry.max(d.norm());
            }
        }
    }
    NijenhuisReport {
        n,
        tensor,
        max_asymmetry,
        integrable: max_asymmetry < tol,
    }
}

/// Row vector `f_z̄ + f_z A` for `f: ℂⁿ → ℂ`, Wirtinger derivatives by central
/// differences with step `h`.
pub fn scalar_cr_residual(
    f: &dyn Fn(&[C64]) -> C64,
    chart: &StructureChart,
    zeta: C64,
    z: &[C64],
    h: f64,
) -> Vec<C64> {
    let n = chart.n();
    let mut fz = vec![C64::new(0.0, 0.0); n];
    let mut fzb = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        let diff = |dir: C64| {
            let mut p = z.to_vec();
            let mut m = z.to_vec();
            p[i] += dir * h;
            m[i] -= dir * h;
            (f(&p) - f(&m)) / (2.0 * h)
        };
        let dx = diff(C64::new(1.0, 0.0));
        let dy = diff(I);
        fz[i] = (dx - I * dy) * 0.5;
        fzb[i] = (dx + I * dy) * 0.5;
    }
    cr_row(&fz, &fzb, &chart.a_at(zeta, z))
}

/// Exact variant of [`scalar_cr_residual`] for polynomial `f` (its ζ-arguments are
/// held at `zeta`).
pub fn scalar_cr_residual_exact(f: &PolynomialMap, chart: &StructureChart, zeta: C64, z: &[C64]) -> Vec<C64> {
    let n = chart.n();
    let fz: Vec<C64> = (0..n).map(|i| f.partial(Var::Z(i)).eval(zeta, z)).collect();
    let fzb: Vec<C64> = (0..n).map(|i| f.partial(Var::ZBar(i)).eval(zeta, z)).collect();
    cr_row(&fz, &fzb, &chart.a_at(zeta, z))
}

fn cr_row(fz: &[C64], fzb: &[C64], a: &DMatrix<C64>) -> Vec<C64> {
    let n = fz.len();
    (0..n)
        .map(|k| fzb[k] + (0..n).map(|j| fz[j] * a[(j, k)]).sum::<C64>())
        .collect()
}
