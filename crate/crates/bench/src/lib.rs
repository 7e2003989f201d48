//! Fixtures shared by the benchmarks.

use jdisc_core::structure::StructureJson;
use jdisc_core::{HolomorphicDatum, SpectralField, StructureChart};
use num_complex::Complex64 as C64;

/// The quadratic structure from `scenarios/structures/quadratic.json`.
pub fn quadratic_chart() -> StructureChart {
    let json: StructureJson =
        serde_json::from_str(include_str!("../../../scenarios/structures/quadratic.json")).expect("bundled structure parses");
    StructureChart::from_json(&json).expect("bundled structure is valid")
}

/// The datum of `scenarios/solve_quadratic.json`.
pub fn quadratic_datum() -> HolomorphicDatum {
    let c = |re: f64, im: f64| C64::new(re, im);
    HolomorphicDatum::new(vec![
        vec![c(0.1, 0.0), c(0.0, 0.0)],
        vec![c(0.3, 0.0), c(0.0, 0.2)],
        vec![c(0.0, 0.0), c(0.1, 0.0)],
    ])
}

/// A dense scalar field of total degree `degree` with deterministic coefficients.
pub fn dense_field(degree: usize) -> SpectralField {
    let mut terms = Vec::new();
    for m in 0..=degree {
        for l in 0..=degree - m {
            let t = (3 * m + 7 * l) as f64;
            terms.push((m, l, C64::new(t.sin(), t.cos()) / (1.0 + (m + l) as f64)));
        }
    }
    SpectralField::scalar_from_terms(&terms)
}
