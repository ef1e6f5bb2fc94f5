//! Loading a scenario file and running the same checks as the command-line
//! tool, printing the JSON report.
//!
//!     cargo run --example scenario_report -- [scenario.json] [validate|psi|pair|properties]

use std::path::PathBuf;

use flatpsi::runner::{run, Command, RunOptions};
use flatpsi::scenario::Scenario;

fn main() -> flatpsi::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join("boundary_chain.json"));
    let command = match args.next().as_deref() {
        None | Some("validate") => Command::Validate,
        Some("psi") => Command::Psi,
        Some("pair") => Command::Pair,
        Some("properties") => Command::Properties,
        Some(other) => panic!("unknown command {other}"),
    };
    let scenario = Scenario::load(&path)?;
    let opts = RunOptions { seed: 42, ..RunOptions::default() };
    let report = run(command, &scenario, &opts)?;
    print!("{}", report.to_json());
    eprintln!("all passed: {}", report.all_passed);
    Ok(())
}
