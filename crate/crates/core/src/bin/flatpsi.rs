use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flatpsi::runner::{exit_status, run, Command, RunOptions};
use flatpsi::scenario::Scenario;

#[derive(Parser)]
#[command(name = "flatpsi", version, about = "Secondary invariants of flat connection families on tori")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Flatness, cycle and relative flatness checks
    Validate(Args),
    /// The invariant form of a cycle
    Psi(Args),
    /// Pairings of the invariant with base cycles
    Pair(Args),
    /// Runs the invariant suite on the scenario and random instances
    Properties(Args),
    /// Transgression form between two connections
    Transgression(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    chain: Option<String>,
    #[arg(long)]
    cycle: Option<String>,
    #[arg(long)]
    reference: Option<String>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    allow_noninvariant: bool,
    /// Cross-check against the numeric oracle
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Monte-Carlo samples for --oracle
    #[arg(long)]
    samples: Option<u64>,
    /// Golden-value file to compare pairings against
    #[arg(long)]
    golden: Option<PathBuf>,
    /// Target connection for `transgression`
    #[arg(long)]
    to: Option<String>,
    /// Random instances per property in `properties`
    #[arg(long)]
    instances: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Validate(a) => (Command::Validate, a),
        Cmd::Psi(a) => (Command::Psi, a),
        Cmd::Pair(a) => (Command::Pair, a),
        Cmd::Properties(a) => (Command::Properties, a),
        Cmd::Transgression(a) => (Command::Transgression, a),
    };
    let opts = RunOptions {
        chain: args.chain,
        cycle: args.cycle,
        reference: args.reference,
        allow_noninvariant: args.allow_noninvariant,
        oracle: args.oracle,
        seed: args.seed,
        samples: args.samples,
        golden: args.golden,
        to: args.to,
        random_instances: args.instances,
    };
    let outcome = Scenario::load(&args.scenario).and_then(|s| run(command, &s, &opts));
    match &outcome {
        Ok(report) => {
            let json = report.to_json();
            match &args.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, json) {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
                None => print!("{json}"),
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_status(&outcome) as u8)
}
