use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qubit_groupoid::runner::{exit_code_for, run, Command, MeasureKind, OutputFormat, Overrides, RunConfig};

/// Verification harness for the qubit-chain groupoid.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    measure: Option<MeasureKind>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long = "J", allow_negative_numbers = true)]
    j: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table file for `dfs-check`.
    #[arg(long)]
    input: Option<PathBuf>,
}

fn fail(code: i32, invariant: &str, msg: String) -> ExitCode {
    let record = serde_json::json!({ "pass": false, "invariant": invariant, "error": msg });
    eprintln!("{record}");
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let base = match &cli.config {
        Some(p) => match RunConfig::from_json_file(p) {
            Ok(c) => c,
            Err(e) => return fail(2, "config", e.to_string()),
        },
        None => RunConfig::default(),
    };
    let overrides = Overrides {
        measure: cli.measure,
        lambda: cli.lambda,
        j: cli.j,
        n: cli.n,
        depth: cli.depth,
        trials: cli.trials,
        seed: cli.seed,
        tol: cli.tol,
        format: cli.format,
        out: cli.out,
        input: cli.input,
    };
    let cfg = match overrides.apply(base) {
        Ok(c) => c,
        Err(e) => return fail(2, "config", e.to_string()),
    };
    match run(cli.command, &cfg) {
        Ok(report) => {
            if let Err(e) = report.emit(&mut std::io::stdout().lock()) {
                return fail(2, "output", e.to_string());
            }
            if let Some(f) = &report.failure {
                eprintln!("{}", serde_json::json!({ "pass": false, "failure": f }));
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => fail(exit_code_for(&e), cli.command.name(), e.to_string()),
    }
}
