//! Scenario files: the JSON input of every command except `selftest`.

use std::path::{Path, PathBuf};

use jdisc_core::discsolve::{Method, SolverOptions, SubmanifoldJson};
use jdisc_core::structure::StructureJson;
use jdisc_core::{HolomorphicDatum, StructureChart};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A complex number as `[re, im]`.
pub type ComplexJson = [f64; 2];

/// Taylor coefficients `φ_0, φ_1, …`, each a vector in `ℂⁿ`.
pub type TaylorJson = Vec<Vec<ComplexJson>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StructureRef {
    /// Path to a structure file, relative to the scenario file.
    Path(String),
    Inline(StructureJson),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    pub method: Option<Method>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub degree: Option<usize>,
    pub centered: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbBlock {
    /// Required immersion margin.
    pub delta: f64,
    pub eps_max: f64,
    pub seed: Option<u64>,
    pub max_draws: usize,
    pub homotopy_steps: usize,
    /// Jet order of the spanning family used by `immerse`.
    pub k: usize,
}

impl Default for PerturbBlock {
    fn default() -> Self {
        Self {
            delta: 1e-4,
            eps_max: 0.05,
            seed: None,
            max_draws: 16,
            homotopy_steps: 8,
            k: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformBlock {
    pub psi: TaylorJson,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetBlock {
    /// `a_0..a_k` with `a_j = ∂_ζ^j u(0)`.
    pub values: Vec<Vec<ComplexJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointJson {
    #[serde(default)]
    pub zeta: ComplexJson,
    #[serde(default)]
    pub z: Vec<ComplexJson>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegrabilityBlock {
    /// Evaluation points; the origin if empty.
    pub points: Vec<PointJson>,
    /// `"integrable"` or `"non_integrable"`; turns the verdict into a check.
    pub expect: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Sup norm of the disc-equation residual.
    pub cr: f64,
    /// Distance of a prescribed jet to the recovered one.
    pub jet: f64,
    /// Nijenhuis asymmetry below which a point counts as integrable.
    pub integrability: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            cr: 1e-8,
            jet: 1e-7,
            integrability: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    /// Write CSV samples of the computed fields next to the report.
    pub csv: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { csv: true }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub command: Option<String>,
    pub structure: Option<StructureRef>,
    pub phi: Option<TaylorJson>,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub perturb: PerturbBlock,
    #[serde(rename = "S")]
    pub submanifold: Option<SubmanifoldJson>,
    pub deform: Option<DeformBlock>,
    pub jet: Option<JetBlock>,
    pub integrability: Option<IntegrabilityBlock>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputBlock,
}

/// A parsed scenario with its structure resolved.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub scenario: Scenario,
    pub structure: Option<StructureJson>,
    pub chart: Option<StructureChart>,
}

pub fn complex(v: &ComplexJson) -> C64 {
    C64::new(v[0], v[1])
}

fn finite(v: &[ComplexJson], what: &str) -> Result<(), CliError> {
    if v.iter().flatten().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(CliError::Schema(format!("{what} has a non-finite entry")))
    }
}

/// Builds a datum with `n` components from Taylor coefficients.
pub fn datum(taylor: &TaylorJson, n: usize, what: &str) -> Result<HolomorphicDatum, CliError> {
    if taylor.is_empty() {
        return Err(CliError::Schema(format!("{what} has no coefficients")));
    }
    let mut coeffs = Vec::with_capacity(taylor.len());
    for (m, row) in taylor.iter().enumerate() {
        if row.len() != n {
            return Err(CliError::Schema(format!(
                "{what}[{m}] has {} components, the structure has n = {n}",
                row.len()
            )));
        }
        finite(row, what)?;
        coeffs.push(row.iter().map(complex).collect());
    }
    Ok(HolomorphicDatum::new(coeffs))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::json("scenario", e))
    }

    /// Solver options after applying command-line overrides.
    pub fn solver_options(&self, degree: Option<usize>, tol: Option<f64>) -> Result<SolverOptions, CliError> {
        let d = SolverOptions::default();
        let opts = SolverOptions {
            method: self.solver.method.unwrap_or(d.method),
            tol: tol.or(self.solver.tol).unwrap_or(d.tol),
            max_iter: self.solver.max_iter.unwrap_or(d.max_iter),
            degree: degree.or(self.solver.degree).unwrap_or(d.degree),
            centered: self.solver.centered.unwrap_or(d.centered),
        };
        if !(opts.tol > 0.0 && opts.tol.is_finite()) {
            return Err(CliError::Schema(format!("solver tolerance {} must be positive", opts.tol)));
        }
        if opts.degree < 2 {
            return Err(CliError::Schema(format!("degree {} is below 2", opts.degree)));
        }
        Ok(opts)
    }

    /// Seed precedence: command line, then `perturb.seed`, then `seed`.
    pub fn explicit_seed(&self, flag: Option<u64>) -> Option<u64> {
        flag.or(self.perturb.seed).or(self.seed)
    }
}

/// Reads a scenario file and the structure it refers to.
pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let scenario = Scenario::parse(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let structure = match &scenario.structure {
        None => None,
        Some(StructureRef::Inline(s)) => Some(s.clone()),
        Some(StructureRef::Path(p)) => Some(read_structure(&base.join(p))?),
    };
    let chart = match &structure {
        None => None,
        Some(s) => Some(StructureChart::from_json(s).map_err(|e| CliError::Schema(format!("structure: {e}")))?),
    };
    Ok(Loaded {
        scenario,
        structure,
        chart,
    })
}

pub fn read_structure(path: &PathBuf) -> Result<StructureJson, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::json(&format!("structure {}", path.display()), e))
}
