use std::path::{Path, PathBuf};
use std::process::Command;

use jdisc_cli::{Check, ErrorKind, RunReport, Status};
use jdisc_core::acceptance::Oracle;
use serde_json::Value;

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

struct Run {
    code: i32,
    report: RunReport,
    text: String,
    dir: tempfile::TempDir,
}

fn jdisc(args: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_jdisc"))
        .args(args)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    let text = std::fs::read_to_string(out.join("report.json")).unwrap_or_else(|_| {
        panic!(
            "no report for {args:?}: {}",
            String::from_utf8_lossy(&status.stderr)
        )
    });
    Run {
        code: status.status.code().unwrap(),
        report: serde_json::from_str(&text).unwrap(),
        text,
        dir,
    }
}

fn scenario(name: &str) -> String {
    scenarios().join(name).to_string_lossy().into_owned()
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn check<'a>(r: &'a RunReport, name: &str) -> &'a Check {
    r.checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

fn c(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn standard_solve_returns_the_datum() {
    let run = jdisc(&["solve", "--scenario", &scenario("solve_standard.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(run.report.status, Status::Pass);
    assert_eq!(check(&run.report, "cr_residual").value, 0.0);
    for s in run.report.results["solution"]["samples"].as_array().unwrap() {
        let zeta = c(&s["zeta"]);
        let g = c(&s["value"][0]);
        assert!((g.0 - zeta.0).abs() < 1e-14 && (g.1 - zeta.1).abs() < 1e-14);
    }
    let csv = std::fs::read_to_string(run.dir.path().join("out/g.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with("zeta")).collect();
    assert!(!rows.is_empty());
    for row in rows {
        let v: Vec<f64> = row.split(',').map(|x| x.trim().parse().unwrap()).collect();
        assert_eq!(v.len(), 4);
        assert!((v[2] - v[0]).abs() < 1e-14 && (v[3] - v[1]).abs() < 1e-14);
    }
}

#[test]
fn every_check_carries_tolerance_and_oracle() {
    let run = jdisc(&["solve", "--scenario", &scenario("solve_quadratic.json")]);
    assert_eq!(run.code, 0);
    assert!(!run.report.checks.is_empty());
    for ch in &run.report.checks {
        assert!(ch.tolerance.is_finite());
        assert!(["<", "<=", ">", ">=", "="].contains(&ch.relation.as_str()));
    }
    assert_eq!(check(&run.report, "cr_residual").oracle, Oracle::Derived);
}

#[test]
fn integrability_of_conjugate_entry() {
    let run = jdisc(&["integrability", "--scenario", &scenario("integrability.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(run.report.results["verdict"], "non_integrable");
    assert_eq!(run.report.results["max_asymmetry"].as_f64().unwrap(), 1.0);
    let tensor = &run.report.results["points"][0]["tensor"];
    assert_eq!(c(&tensor[0][0][1]), (1.0, 0.0));
    assert_eq!(c(&tensor[0][1][0]), (0.0, 0.0));
}

#[test]
fn immerse_cusp() {
    let run = jdisc(&["immerse", "--scenario", &scenario("immerse_cusp.json")]);
    assert_eq!(run.code, 0, "{}", run.text);
    let r = &run.report.results;
    assert_eq!(r["margin_before"]["margin"].as_f64().unwrap(), 0.0);
    assert!(r["margin_after"]["margin"].as_f64().unwrap() > 1e-4);
    assert_eq!(r["perturbation"]["homotopy_steps"], 8);
    let s = r["perturbation"]["s_norm"].as_f64().unwrap();
    assert!(s > 0.0 && s <= 0.05);
    assert!(check(&run.report, "homotopy_cr_residual").passed);
}

#[test]
fn reports_are_deterministic_up_to_timings() {
    let args = ["transversal", "--scenario", &scenario("transversal_cusp.json")];
    let a = jdisc(&args);
    let b = jdisc(&args);
    assert_eq!(a.code, 0);
    let strip = |t: &str| t[..t.find("\"timings\"").unwrap()].to_string();
    assert_eq!(strip(&a.text), strip(&b.text));
    assert!(!a.report.inputs_digest.is_empty());
    assert_eq!(a.report.seed, 3);
}

#[test]
fn seed_flag_changes_digest_and_seed() {
    let a = jdisc(&["immerse", "--scenario", &scenario("immerse_cusp.json")]);
    let b = jdisc(&["immerse", "--scenario", &scenario("immerse_cusp.json"), "--seed", "7"]);
    assert_eq!(b.report.seed, 7);
    assert_ne!(a.report.inputs_digest, b.report.inputs_digest);
    assert_eq!(b.code, 0);
}

#[test]
fn report_round_trips() {
    let run = jdisc(&["kernel", "--scenario", &scenario("kernel.json")]);
    assert_eq!(run.code, 0);
    let again = serde_json::to_string_pretty(&run.report).unwrap();
    assert_eq!(again + "\n", run.text);
    let mut r = run.report.clone();
    r.checks.push(Check::below("nan", f64::NAN, f64::INFINITY, Oracle::Trivial));
    let back: RunReport = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn corrupted_structure_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    write_scenario(
        dir.path(),
        "broken.json",
        r#"{ "n": 1, "A": [[[{ "pz": [1, 2], "c": [1.0, 0.0] }]]] }"#,
    );
    let sc = write_scenario(
        dir.path(),
        "s.json",
        r#"{ "structure": "broken.json", "phi": [[[0.0, 0.0]], [[1.0, 0.0]]] }"#,
    );
    let run = jdisc(&["solve", "--scenario", &sc]);
    assert_eq!(run.code, 3);
    assert_eq!(run.report.status, Status::Error);
    assert_eq!(run.report.error.as_ref().unwrap().kind, ErrorKind::Schema);

    write_scenario(dir.path(), "broken.json", r#"{ "n": 1, "A": [[[{ "pz": [1"#);
    let run = jdisc(&["solve", "--scenario", &sc]);
    assert_eq!(run.code, 3);
    assert_eq!(run.report.error.as_ref().unwrap().kind, ErrorKind::Parse);
}

#[test]
fn input_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let wrong_command = write_scenario(
        dir.path(),
        "a.json",
        r#"{ "command": "immerse", "structure": { "n": 1, "A": [[[]]] }, "phi": [[[0.0, 0.0]]] }"#,
    );
    assert_eq!(jdisc(&["solve", "--scenario", &wrong_command]).code, 3);
    let bad_phi = write_scenario(
        dir.path(),
        "b.json",
        r#"{ "structure": { "n": 2, "A": [[[], []], [[], []]] }, "phi": [[[0.0, 0.0]]] }"#,
    );
    let run = jdisc(&["solve", "--scenario", &bad_phi]);
    assert_eq!(run.code, 3);
    assert!(run.report.error.unwrap().message.contains("components"));
    let unknown = write_scenario(dir.path(), "c.json", r#"{ "structure": { "n": 1, "A": [[[]]] }, "phii": [] }"#);
    assert_eq!(jdisc(&["solve", "--scenario", &unknown]).code, 3);
    assert_eq!(jdisc(&["solve", "--scenario", "/nonexistent/s.json"]).code, 3);

    let status = Command::new(env!("CARGO_BIN_EXE_jdisc")).arg("solve").output().unwrap();
    assert_eq!(status.status.code(), Some(3));
    let status = Command::new(env!("CARGO_BIN_EXE_jdisc")).arg("frobnicate").output().unwrap();
    assert_eq!(status.status.code(), Some(3));
}

#[test]
fn numerical_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write_scenario(
        dir.path(),
        "s.json",
        &format!(
            r#"{{ "structure": "{}", "phi": [[[0.1, 0.0], [0.0, 0.0]], [[0.5, 0.0], [0.0, 0.5]]], "solver": {{ "max_iter": 1 }} }}"#,
            scenarios().join("structures/quadratic.json").display()
        ),
    );
    let run = jdisc(&["solve", "--scenario", &sc]);
    assert_eq!(run.code, 2);
    let err = run.report.error.unwrap();
    assert_eq!(err.kind, ErrorKind::Numerical);
    assert!(err.message.contains("no convergence"));
}

#[test]
fn failed_check_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write_scenario(
        dir.path(),
        "s.json",
        r#"{ "structure": { "n": 2, "A": [[[{ "c": [0.1, 0.0] }], []], [[], []]] },
             "integrability": { "expect": "non_integrable" } }"#,
    );
    let run = jdisc(&["integrability", "--scenario", &sc]);
    assert_eq!(run.code, 2);
    assert_eq!(run.report.status, Status::Fail);
    assert_eq!(run.report.results["verdict"], "integrable");
}

#[test]
fn selftest_at_low_degree() {
    let run = jdisc(&["selftest", "--degree", "4"]);
    assert_eq!(run.code, 0, "{}", run.text);
    assert_eq!(run.report.checks.len(), 12);
    assert!(run.report.checks.iter().all(|c| c.passed));
    assert_eq!(run.report.results["config"]["degree"], 4);
    let cauchy = &run.report.checks[0];
    assert_eq!(cauchy.tolerance, 1e-4);
    assert_eq!(run.report.checks[1].tolerance, 1e-10);
}

#[test]
fn bundled_scenarios_pass() {
    let mut names: Vec<_> = std::fs::read_dir(scenarios())
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    assert!(names.len() >= 8);
    for path in names {
        let text = std::fs::read_to_string(&path).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        let cmd = v["command"].as_str().unwrap();
        let run = jdisc(&[cmd, "--scenario", &path.to_string_lossy()]);
        assert_eq!(run.code, 0, "{}: {}", path.display(), run.text);
    }
}
