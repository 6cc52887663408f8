//! Drives the verification harness from code instead of the command line.

use qubit_groupoid::runner::{run, Command, OutputFormat, RunConfig};
use qubit_groupoid::MeasureSpec;

fn main() -> qubit_groupoid::Result<()> {
    let cfg = RunConfig { n: 3, depth: 4, trials: 50, seed: 1, ..RunConfig::default() };
    for cmd in Command::ALL {
        let r = run(cmd, &cfg)?;
        println!("{:<16} {}", cmd.name(), if r.pass { "pass" } else { "FAIL" });
    }
    let cfg =
        RunConfig { measure: Some(MeasureSpec::ising(1.0)?), n: 2, format: OutputFormat::Csv, ..RunConfig::default() };
    print!("{}", run(Command::IsingPartition, &cfg)?.to_csv());
    Ok(())
}
