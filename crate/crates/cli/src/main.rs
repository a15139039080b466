use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use torus_vacant::experiments::{exit_code, run_command, Command, RunOptions};

#[derive(Parser)]
#[command(name = "torus-vacant", version, about = "Vacant set of random walk on the discrete torus")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Vacant fraction against u.
    Survival(RunArgs),
    /// Giant-component statistics across a u grid.
    ScanU(RunArgs),
    /// Segment event V and longest vacant axis runs.
    Segments(RunArgs),
    /// Largest vacant L-infinity ball across N.
    LargestBall(RunArgs),
    /// Box excursion counts at several u.
    Excursions(RunArgs),
    /// Total variation between torus excursions and the limit law.
    Coupling(RunArgs),
    /// Return probabilities and the derived constants.
    Constants(RunArgs),
    /// Return probability q(nu) by quadrature, asymptotics and Monte Carlo.
    Qnu(RunArgs),
    /// Brute-force oracles and exact invariants on small grids.
    Validate(RunArgs),
    /// Print the JSON Schema of a command's config.
    Schema { command: String },
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON config; every field is optional.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Survival(a) => (Command::Survival, a),
        Cmd::ScanU(a) => (Command::ScanU, a),
        Cmd::Segments(a) => (Command::Segments, a),
        Cmd::LargestBall(a) => (Command::LargestBall, a),
        Cmd::Excursions(a) => (Command::Excursions, a),
        Cmd::Coupling(a) => (Command::Coupling, a),
        Cmd::Constants(a) => (Command::Constants, a),
        Cmd::Qnu(a) => (Command::Qnu, a),
        Cmd::Validate(a) => (Command::Validate, a),
        Cmd::Schema { command } => {
            return match command.parse::<Command>() {
                Ok(c) => {
                    println!("{}", serde_json::to_string_pretty(&c.schema()).expect("schema serializes"));
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            };
        }
    };
    let json = match &args.config {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", p.display());
                return ExitCode::from(2);
            }
        },
        None => String::new(),
    };
    let opts = RunOptions {
        out: Some(args.out),
        jobs: args.jobs,
        seed: args.seed,
    };
    let result = run_command(command, &json, &opts);
    match &result {
        Ok(o) => {
            if let Some(p) = &o.paths {
                eprintln!("wrote {}", p.csv.display());
            }
            print!("{}", o.csv());
            if !o.passed {
                eprintln!("{command}: invariant failures");
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
