//! Command-line interface: `sweep` (strategy curves over a damping grid),
//! `capacity` (BSC/QSC comparison with crossing report), `povm` (one
//! certified collective solve), and `bounds` (direct converse/RCB
//! evaluation). Exit codes: 0 success, 2 configuration error, 3 solver
//! non-convergence, 4 structure-check failure, 1 I/O or internal error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use cqadc_cli::{
    bounds_report, povm_report, run_capacity, run_sweep, BoundSelection, CapacityConfig, CliResult,
    SweepConfig, SweepFile,
};

#[derive(Parser)]
#[command(
    name = "cqadc",
    version,
    about = "Classical messaging over the qubit amplitude damping channel: \
             exact decoding curves, capacity comparisons, and finite-blocklength bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep decoding strategies over a damping grid and write CSV
    Sweep(SweepArgs),
    /// Compare induced BSC/QSC capacities and report their crossing
    Capacity(CapacityArgs),
    /// Solve one collective measurement and print its certificate
    Povm(PovmArgs),
    /// Evaluate the converse and random-coding bounds directly
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// JSON config file; individual flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named code (spc_3_2, reduced_hamming_6_3, hamming_7_4, trivial_<n>)
    /// or path to a JSON code definition
    #[arg(long)]
    code: Option<String>,
    /// First damping value of the grid
    #[arg(long)]
    gamma_start: Option<f64>,
    /// Last damping value of the grid
    #[arg(long)]
    gamma_stop: Option<f64>,
    /// Grid spacing
    #[arg(long)]
    gamma_step: Option<f64>,
    /// Comma-separated columns: individual_ml, collective_optimal, pgm,
    /// converse, rcb
    #[arg(long)]
    strategies: Option<String>,
    /// Certificate tolerance for the collective solver
    #[arg(long)]
    tol: Option<f64>,
    /// Output CSV path (standard output when omitted); solver warnings go
    /// to <out>.log
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct CapacityArgs {
    /// First damping value of the CSV grid
    #[arg(long)]
    gamma_start: Option<f64>,
    /// Last damping value of the CSV grid
    #[arg(long)]
    gamma_stop: Option<f64>,
    /// CSV grid spacing
    #[arg(long)]
    gamma_step: Option<f64>,
    /// Bisection resolution of the reported crossing point
    #[arg(long)]
    resolution: Option<f64>,
    /// Certificate tolerance for the per-point measurement solves
    #[arg(long)]
    tol: Option<f64>,
    /// Output CSV path (standard output when omitted)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct PovmArgs {
    /// Named code or path to a JSON code definition
    #[arg(long)]
    code: String,
    /// Damping parameter
    #[arg(long)]
    gamma: f64,
    /// Certificate tolerance (defaults by block dimension)
    #[arg(long)]
    tol: Option<f64>,
    /// Emit the report as JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BoundsArgs {
    /// Blocklength
    #[arg(long)]
    n: usize,
    /// Number of messages
    #[arg(long)]
    m: u64,
    /// Alphabet size
    #[arg(long, default_value_t = 2)]
    q: u8,
    /// Symmetric-channel error parameter
    #[arg(long)]
    eps: f64,
    /// Which bound to evaluate: converse, rcb, or both
    #[arg(long, default_value = "both")]
    bound: String,
    /// Emit the report as JSON instead of text
    #[arg(long)]
    json: bool,
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Sweep(args) => {
            let file = match &args.config {
                Some(path) => SweepFile::load(path)?,
                None => SweepFile::default(),
            };
            let flags = SweepFile {
                code: args.code,
                gamma_start: args.gamma_start,
                gamma_stop: args.gamma_stop,
                gamma_step: args.gamma_step,
                strategies: args
                    .strategies
                    .map(|list| list.split(',').map(|s| s.trim().to_string()).collect()),
                tol: args.tol,
                out: args.out,
            };
            let config = SweepConfig::resolve(file, flags)?;
            run_sweep(&config)
        }
        Command::Capacity(args) => {
            let config = CapacityConfig::resolve(
                args.gamma_start,
                args.gamma_stop,
                args.gamma_step,
                args.resolution,
                args.tol,
                args.out.as_deref(),
            )?;
            run_capacity(&config)
        }
        Command::Povm(args) => {
            let report = povm_report(&args.code, args.gamma, args.tol)?;
            if args.json {
                println!("{}", report.json());
            } else {
                print!("{}", report.text());
            }
            Ok(())
        }
        Command::Bounds(args) => {
            let selection: BoundSelection = args.bound.parse()?;
            let report = bounds_report(args.n, args.m, args.q, args.eps, selection, args.json)?;
            print!("{report}");
            if args.json {
                println!();
            }
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli.command) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
