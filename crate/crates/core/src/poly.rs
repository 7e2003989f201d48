//! Exact multivariate polynomials in `(ζ, ζ̄, z₁..zₙ, z̄₁..z̄ₙ)` with complex
//! coefficients.
//!
//! These carry the entries of the complex matrix `A` and of the affine term
//! `b`, so every partial derivative needed downstream (integrability tensor,
//! linearization coefficients) is computed exactly rather than by finite
//! differences.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A variable of a [`PolynomialMap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Zeta,
    ZetaBar,
    Z(usize),
    ZBar(usize),
}

impl Var {
    fn slot(self, n: usize) -> usize {
        match self {
            Var::Zeta => 0,
            Var::ZetaBar => 1,
            Var::Z(i) => {
                assert!(i < n, "z index {i} out of range for n = {n}");
                2 + i
            }
            Var::ZBar(i) => {
                assert!(i < n, "z̄ index {i} out of range for n = {n}");
                2 + n + i
            }
        }
    }
}

/// Polynomial map `ℂ × ℂⁿ → ℂ`. Exponent tuples are laid out as
/// `[ζ, ζ̄, z₁..zₙ, z̄₁..z̄ₙ]`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialMap {
    n: usize,
    terms: BTreeMap<Vec<u32>, C64>,
}

/// One term in the JSON structure-file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyTermJson {
    #[serde(default)]
    pub pz: Vec<u32>,
    #[serde(default)]
    pub pzb: Vec<u32>,
    #[serde(default)]
    pub pzeta: [u32; 2],
    pub c: [f64; 2],
}

impl PolynomialMap {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: C64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![0; 2 + 2 * n], c);
        p
    }

    /// `c · ∏ var^power`.
    pub fn monomial(n: usize, c: C64, powers: &[(Var, u32)]) -> Self {
        let mut exps = vec![0; 2 + 2 * n];
        for &(v, p) in powers {
            exps[v.slot(n)] += p;
        }
        let mut out = Self::zero(n);
        out.add_term(exps, c);
        out
    }

    /// The coordinate function `z_i`.
    pub fn z(n: usize, i: usize) -> Self {
        Self::monomial(n, C64::new(1.0, 0.0), &[(Var::Z(i), 1)])
    }

    pub fn num_vars_z(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], C64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exps: Vec<u32>, c: C64) {
        debug_assert_eq!(exps.len(), 2 + 2 * self.n);
        if c == C64::new(0.0, 0.0) {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == C64::new(0.0, 0.0) {
                    o.remove();
                }
            }
        }
    }

    /// True when no term involves any `z` or `z̄` variable.
    pub fn is_independent_of_z(&self) -> bool {
        self.terms.keys().all(|e| e[2..].iter().all(|&p| p == 0))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&p| p == 0))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Degree in the `(ζ, ζ̄)` variables alone.
    pub fn zeta_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e[0] + e[1])
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, zeta: C64, z: &[C64]) -> C64 {
        assert_eq!(z.len(), self.n, "point has wrong dimension");
        let zeta_bar = zeta.conj();
        let mut acc = C64::new(0.0, 0.0);
        for (e, &c) in &self.terms {
            let mut t = c * pow(zeta, e[0]) * pow(zeta_bar, e[1]);
            for i in 0..self.n {
                t *= pow(z[i], e[2 + i]) * pow(z[i].conj(), e[2 + self.n + i]);
            }
            acc += t;
        }
        acc
    }

    /// Exact partial derivative with respect to one variable.
    pub fn partial(&self, var: Var) -> Self {
        let s = var.slot(self.n);
        let mut out = Self::zero(self.n);
        for (e, &c) in &self.terms {
            if e[s] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[s] -= 1;
            out.add_term(d, c * e[s] as f64);
        }
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::zero(self.n);
        for (e, &v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn to_json_terms(&self) -> Vec<PolyTermJson> {
        self.terms
            .iter()
            .map(|(e, c)| PolyTermJson {
                pz: e[2..2 + self.n].to_vec(),
                pzb: e[2 + self.n..].to_vec(),
                pzeta: [e[0], e[1]],
                c: [c.re, c.im],
            })
            .collect()
    }

    pub fn from_json_terms(n: usize, terms: &[PolyTermJson]) -> Result<Self> {
        let mut out = Self::zero(n);
        for t in terms {
            if t.pz.len() > n || t.pzb.len() > n {
                return Err(Error::Schema(format!(
                    "term has {} z-powers / {} z̄-powers but n = {n}",
                    t.pz.len(),
                    t.pzb.len()
                )));
            }
            if !(t.c[0].is_finite() && t.c[1].is_finite()) {
                return Err(Error::Schema("non-finite coefficient".into()));
            }
            let mut exps = vec![0; 2 + 2 * n];
            exps[0] = t.pzeta[0];
            exps[1] = t.pzeta[1];
            for (i, &p) in t.pz.iter().enumerate() {
                exps[2 + i] = p;
            }
            for (i, &p) in t.pzb.iter().enumerate() {
                exps[2 + n + i] = p;
            }
            out.add_term(exps, C64::new(t.c[0], t.c[1]));
        }
        Ok(out)
    }
}

fn pow(x: C64, p: u32) -> C64 {
    match p {
        0 => C64::new(1.0, 0.0),
        1 => x,
        _ => x.powu(p),
    }
}

impl Add for &PolynomialMap {
    type Output = PolynomialMap;
    fn add(self, rhs: &PolynomialMap) -> PolynomialMap {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (e, &c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl Sub for &PolynomialMap {
    type Output = PolynomialMap;
    fn sub(self, rhs: &PolynomialMap) -> PolynomialMap {
        self + &(-rhs)
    }
}

impl Neg for &PolynomialMap {
    type Output = PolynomialMap;
    fn neg(self) -> PolynomialMap {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &PolynomialMap {
    type Output = PolynomialMap;
    fn mul(self, rhs: &PolynomialMap) -> PolynomialMap {
        assert_eq!(self.n, rhs.n);
        let mut out = PolynomialMap::zero(self.n);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}
