//! Text dumps of fields: grid values as CSV and coefficients as JSON.

use std::io::Write;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::field::{synthesize, SpectralField};
use super::grid::DiscGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub m: usize,
    pub l: usize,
    pub c: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffDump {
    #[serde(rename = "N")]
    pub degree: usize,
    pub coeffs: Vec<CoeffEntry>,
}

impl CoeffDump {
    pub fn from_field(f: &SpectralField) -> Self {
        let mut coeffs = Vec::new();
        for d in 0..=f.degree() {
            for l in 0..=d {
                let m = d - l;
                let c: Vec<[f64; 2]> = (0..f.ncomp())
                    .map(|k| {
                        let v = f.get(k, m, l);
                        [v.re, v.im]
                    })
                    .collect();
                if c.iter().any(|v| v[0] != 0.0 || v[1] != 0.0) {
                    coeffs.push(CoeffEntry { m, l, c });
                }
            }
        }
        Self {
            degree: f.degree(),
            coeffs,
        }
    }

    /// Rebuilds the field; `ncomp` is needed when the dump has no entries.
    pub fn to_field(&self, ncomp: usize) -> Result<SpectralField> {
        let mut f = SpectralField::zeros(ncomp, self.degree);
        for e in &self.coeffs {
            if e.m + e.l > self.degree {
                return Err(Error::Schema(format!(
                    "coefficient ({}, {}) exceeds N = {}",
                    e.m, e.l, self.degree
                )));
            }
            if e.c.len() != ncomp {
                return Err(Error::Schema(format!(
                    "coefficient ({}, {}) has {} components, expected {ncomp}",
                    e.m,
                    e.l,
                    e.c.len()
                )));
            }
            for (k, v) in e.c.iter().enumerate() {
                f.add_at(k, e.m, e.l, C64::new(v[0], v[1]));
            }
        }
        Ok(f)
    }
}

/// Writes one row per grid point: `zeta_re, zeta_im, u1_re, u1_im, ...`.
pub fn write_field_csv<W: Write>(f: &SpectralField, grid: &DiscGrid, mut out: W) -> std::io::Result<()> {
    let vals = synthesize(f, grid);
    write!(out, "zeta_re,zeta_im")?;
    for c in 0..f.ncomp() {
        write!(out, ",u{}_re,u{}_im", c + 1, c + 1)?;
    }
    writeln!(out)?;
    for p in 0..grid.len() {
        let z = grid.point(p);
        write!(out, "{:.17e},{:.17e}", z.re, z.im)?;
        for c in 0..f.ncomp() {
            let v = vals.at(c, p);
            write!(out, ",{:.17e},{:.17e}", v.re, v.im)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_json_round_trip() {
        let f = SpectralField::from_components(&[
            SpectralField::scalar_from_terms(&[(1, 2, C64::new(1.5, -0.25))]),
            SpectralField::scalar_from_terms(&[(0, 0, C64::new(0.0, 3.0))]),
        ]);
        let dump = CoeffDump::from_field(&f);
        let text = serde_json::to_string(&dump).unwrap();
        assert!(text.contains("\"N\":3"));
        let back: CoeffDump = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_field(2).unwrap(), f);
    }

    #[test]
    fn csv_has_one_row_per_point() {
        let grid = DiscGrid::new(3, 8);
        let mut buf = Vec::new();
        write_field_csv(&SpectralField::constant(C64::new(1.0, 0.0)), &grid, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 24);
        assert!(text.starts_with("zeta_re,zeta_im,u1_re,u1_im"));
    }
}
