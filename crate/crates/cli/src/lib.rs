//! Command-line front end for `jdisc-core`: scenario files in, JSON reports
//! and CSV field samples out.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use jdisc_core::cgreen::write_field_csv;
use jdisc_core::{DiscGrid, SpectralField};
use sha2::{Digest, Sha256};

pub mod commands;
pub mod report;
pub mod scenario;

pub use report::{Check, ErrorInfo, ErrorKind, RunReport, Status, EXIT_INPUT, EXIT_NUMERICAL, EXIT_PASS};
pub use scenario::Scenario;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// The input could not be read or is not JSON.
    Parse(String),
    /// The input is JSON but does not describe a valid problem.
    Schema(String),
    Numerical(jdisc_core::Error),
}

impl CliError {
    pub fn json(what: &str, e: serde_json::Error) -> Self {
        use serde_json::error::Category;
        match e.classify() {
            Category::Data => Self::Schema(format!("{what}: {e}")),
            _ => Self::Parse(format!("{what}: {e}")),
        }
    }

    fn info(&self) -> ErrorInfo {
        match self {
            Self::Parse(m) => ErrorInfo {
                kind: ErrorKind::Parse,
                message: m.clone(),
            },
            Self::Schema(m) => ErrorInfo {
                kind: ErrorKind::Schema,
                message: m.clone(),
            },
            Self::Numerical(e) => ErrorInfo {
                kind: ErrorKind::Numerical,
                message: e.to_string(),
            },
        }
    }
}

impl From<jdisc_core::Error> for CliError {
    fn from(e: jdisc_core::Error) -> Self {
        match e {
            jdisc_core::Error::Schema(m) => Self::Schema(m),
            jdisc_core::Error::DimensionMismatch(m) => Self::Schema(format!("dimension mismatch: {m}")),
            jdisc_core::Error::ModeMismatch(m) => Self::Schema(format!("mode mismatch: {m}")),
            other => Self::Numerical(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Solve F(g) = phi for a disc.
    Solve,
    /// Follow the family F(g_t) = F(g) + t psi.
    Deform,
    /// Prescribe a jet at the origin for the linearized equation.
    JetSolve,
    /// Kernel of the linearized operator and its modification.
    Kernel,
    /// Nijenhuis tensor of the structure at given points.
    Integrability,
    /// Perturb a disc to an immersion.
    Immerse,
    /// Check and restore transversality of a jet extension.
    Transversal,
    /// Run the acceptance suite.
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Solve => "solve",
            Self::Deform => "deform",
            Self::JetSolve => "jet-solve",
            Self::Kernel => "kernel",
            Self::Integrability => "integrability",
            Self::Immerse => "immerse",
            Self::Transversal => "transversal",
            Self::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "jdisc", version, about = "Pseudo-holomorphic discs in almost complex C^n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Directory for report.json and CSV samples; the report goes to stdout otherwise.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the degree budget.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    /// Overrides the solver tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

/// A field to be written as `<name>.csv`, sampled on `grid`.
#[derive(Debug, Clone)]
pub struct FieldSample {
    pub name: String,
    pub field: SpectralField,
    pub grid: DiscGrid,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub fields: Vec<FieldSample>,
    pub write_csv: bool,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest(value: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(value).expect("json value serializes");
    hex(&Sha256::digest(&bytes))
}

/// Runs one command. Never panics on bad input; errors end up in the report.
pub fn run(cli: &Cli) -> Outcome {
    let start = Instant::now();
    let name = cli.command.name();
    let prepared = commands::prepare(cli);
    let load_time = start.elapsed().as_secs_f64();
    let mut outcome = match prepared {
        Err((e, seed)) => {
            let mut report = RunReport::new(name, seed, String::new());
            report.error = Some(e.info());
            Outcome {
                report,
                fields: Vec::new(),
                write_csv: false,
            }
        }
        Ok(ctx) => {
            let mut report = RunReport::new(name, ctx.seed, ctx.digest.clone());
            let write_csv = ctx.write_csv;
            let mut fields = Vec::new();
            match commands::dispatch(cli.command, &ctx) {
                Ok(done) => {
                    report.checks = done.checks;
                    report.results = done.results;
                    fields = done.fields;
                }
                Err(e) => report.error = Some(e.info()),
            }
            Outcome {
                report,
                fields,
                write_csv,
            }
        }
    };
    outcome.report.finalize();
    let total = start.elapsed().as_secs_f64();
    outcome.report.timings.insert("load".into(), load_time);
    outcome.report.timings.insert("compute".into(), total - load_time);
    outcome.report.timings.insert("total".into(), total);
    outcome
}

/// Writes `report.json` and CSV samples into `dir`.
pub fn write_outputs(outcome: &Outcome, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), outcome.report.to_json() + "\n")?;
    if outcome.write_csv {
        for f in &outcome.fields {
            let mut file = std::io::BufWriter::new(fs::File::create(dir.join(format!("{}.csv", f.name)))?);
            write_field_csv(&f.field, &f.grid, &mut file)?;
            file.flush()?;
        }
    }
    Ok(())
}
