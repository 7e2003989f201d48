use std::process::ExitCode;

use clap::Parser;
use jdisc_cli::{run, write_outputs, Cli, EXIT_INPUT};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = run(&cli);
    match &cli.out {
        Some(dir) => {
            if let Err(e) = write_outputs(&outcome, dir) {
                eprintln!("cannot write to {}: {e}", dir.display());
                return ExitCode::from(EXIT_INPUT);
            }
            print!("{}", outcome.report.table());
        }
        None => {
            println!("{}", outcome.report.to_json());
            eprint!("{}", outcome.report.table());
        }
    }
    ExitCode::from(outcome.report.exit_code())
}
