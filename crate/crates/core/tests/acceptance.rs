//! Runs the twelve acceptance criteria and prints one line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use jdisc_core::acceptance::{run_criterion, AcceptanceConfig, CRITERIA};

fn main() -> ExitCode {
    let cfg = AcceptanceConfig::default();
    let mut failed = Vec::new();
    println!("\nacceptance suite (N = {}, seed {})", cfg.degree, cfg.seed);
    for (id, _) in CRITERIA {
        let start = Instant::now();
        let r = run_criterion(id, &cfg);
        println!("{}  [{:.2}s]", r.line(), start.elapsed().as_secs_f64());
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed\n", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}\n");
        ExitCode::FAILURE
    }
}
