//! The JSON run report written by every command.

use std::collections::BTreeMap;

use jdisc_core::acceptance::Oracle;
use serde::{Deserialize, Serialize};

/// Serializes non-finite floats as the strings `"NaN"`, `"inf"` and `"-inf"`
/// so reports round-trip exactly.
pub mod float_repr {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("NaN")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

/// One asserted numeric claim.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(with = "float_repr")]
    pub value: f64,
    #[serde(with = "float_repr")]
    pub tolerance: f64,
    /// How `value` must compare with `tolerance`: `<`, `<=`, `>`, `>=` or `=`.
    pub relation: String,
    pub oracle: Oracle,
    pub passed: bool,
}

impl PartialEq for Check {
    fn eq(&self, other: &Self) -> bool {
        let same = |a: f64, b: f64| a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan());
        self.name == other.name
            && same(self.value, other.value)
            && same(self.tolerance, other.tolerance)
            && self.relation == other.relation
            && self.oracle == other.oracle
            && self.passed == other.passed
    }
}

impl Check {
    fn new(name: &str, value: f64, tolerance: f64, relation: &str, oracle: Oracle, passed: bool) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance,
            relation: relation.to_string(),
            oracle,
            passed,
        }
    }

    pub fn below(name: &str, value: f64, tolerance: f64, oracle: Oracle) -> Self {
        Self::new(name, value, tolerance, "<", oracle, value < tolerance)
    }

    pub fn at_most(name: &str, value: f64, tolerance: f64, oracle: Oracle) -> Self {
        Self::new(name, value, tolerance, "<=", oracle, value <= tolerance)
    }

    pub fn above(name: &str, value: f64, tolerance: f64, oracle: Oracle) -> Self {
        Self::new(name, value, tolerance, ">", oracle, value > tolerance)
    }

    pub fn at_least(name: &str, value: f64, tolerance: f64, oracle: Oracle) -> Self {
        Self::new(name, value, tolerance, ">=", oracle, value >= tolerance)
    }

    pub fn equals(name: &str, value: f64, expected: f64, oracle: Oracle) -> Self {
        Self::new(name, value, expected, "=", oracle, value == expected)
    }

    /// A check with an externally decided outcome.
    pub fn with_outcome(
        name: &str,
        value: f64,
        tolerance: f64,
        relation: &str,
        oracle: Oracle,
        passed: bool,
    ) -> Self {
        Self::new(name, value, tolerance, relation, oracle, passed)
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] {:<34} {:<11.3e} {:<2} {:<9.1e} ({:?})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.relation,
            self.tolerance,
            self.oracle
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Parse,
    Schema,
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: ErrorKind,
    pub message: String,
}

/// Exit code when every check passes.
pub const EXIT_PASS: u8 = 0;
/// Exit code for a failed check or a numerical error.
pub const EXIT_NUMERICAL: u8 = 2;
/// Exit code for unreadable or invalid input.
pub const EXIT_INPUT: u8 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    pub seed: u64,
    /// SHA-256 of the resolved inputs (scenario, structure, overrides).
    pub inputs_digest: String,
    pub status: Status,
    pub checks: Vec<Check>,
    pub results: serde_json::Value,
    pub error: Option<ErrorInfo>,
    /// Wall-clock seconds per phase; the only nondeterministic field.
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(command: &str, seed: u64, inputs_digest: String) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            inputs_digest,
            status: Status::Pass,
            checks: Vec::new(),
            results: serde_json::Value::Null,
            error: None,
            timings: BTreeMap::new(),
        }
    }

    /// Sets `status` from the checks and the error, if any.
    pub fn finalize(&mut self) {
        self.status = if self.error.is_some() {
            Status::Error
        } else if self.checks.iter().all(|c| c.passed) {
            Status::Pass
        } else {
            Status::Fail
        };
    }

    pub fn exit_code(&self) -> u8 {
        match (&self.status, &self.error) {
            (Status::Pass, _) => EXIT_PASS,
            (_, Some(ErrorInfo { kind: ErrorKind::Parse | ErrorKind::Schema, .. })) => EXIT_INPUT,
            _ => EXIT_NUMERICAL,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable pass/fail table.
    pub fn table(&self) -> String {
        let mut out = format!("{} ({}), seed {}\n", self.command, self.inputs_digest, self.seed);
        for c in &self.checks {
            out.push_str(&c.line());
            out.push('\n');
        }
        if let Some(e) = &self.error {
            out.push_str(&format!("error ({:?}): {}\n", e.kind, e.message));
        }
        out.push_str(&format!(
            "{}: {}/{} checks passed\n",
            match self.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            },
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len()
        ));
        out
    }
}
