//! fisherlab: Fisher-information analysis of twin-Fock interferometry with
//! preparation inefficiency, one-arm loss, and detector inefficiency.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical diagnostic,
//! 4 validation failure.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fisherlab::bench::{advantage_ratio, hb_lossy_qfi, sql};
use fisherlab::{cfi, run_pipeline, Error, PipelineConfig};

mod output;
mod sweep;
mod validate;

#[derive(Parser)]
#[command(
    name = "fisherlab",
    about = "Twin-Fock interferometry under loss: quantum and classical Fisher information",
    version
)]
struct Cli {
    /// Worker threads for sweeps (default: all cores; FISHERLAB_THREADS as fallback).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single quantity at one parameter point.
    Eval(EvalArgs),
    /// Sweep a quantity over parameter grids and write CSV or JSON.
    Sweep(sweep::SweepArgs),
    /// Cross-check every closed form against the simulation pipeline.
    Validate(validate::ValidateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EvalQuantity {
    /// Twin-Fock QFI under one-arm loss (lost-photon block decomposition).
    Qfi,
    /// Classical Fisher information of the counting distribution.
    Cfi,
    /// Standard quantum limit 2 k eta eta_d.
    Sql,
    /// Phase-maximized advantage ratio against the SQL.
    Ratio,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, value_enum)]
    quantity: EvalQuantity,

    /// Photon pairs N of the twin-Fock probe (qfi, cfi).
    #[arg(long, default_value_t = 2)]
    n: u32,

    /// Photon pairs k of the benchmark (sql, ratio).
    #[arg(long, default_value_t = 2)]
    k: u32,

    /// Phase, radians.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    phi: f64,

    /// Preparation efficiency.
    #[arg(long, default_value_t = 1.0)]
    eta_p: f64,

    /// Interferometer transmissivity.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,

    /// Detector efficiency.
    #[arg(long, default_value_t = 1.0)]
    eta_d: f64,
}

fn eval(args: &EvalArgs) -> Result<(), Error> {
    match args.quantity {
        EvalQuantity::Qfi => {
            let j = hb_lossy_qfi(args.n, args.eta)?;
            println!("qfi = {j}");
            println!("engine: lost-photon block decomposition over the exact loss sectors");
        }
        EvalQuantity::Cfi => {
            let dist = run_pipeline(&PipelineConfig::new(
                args.n, args.phi, args.eta_p, args.eta, args.eta_d,
            )?)?;
            let f = cfi(&dist)?;
            println!("cfi = {f}");
            println!("engine: exact counting distribution with analytic phase derivatives");
        }
        EvalQuantity::Sql => {
            let value = sql(args.k, args.eta, args.eta_d);
            println!("sql = {value}");
            println!("engine: closed form 2 k eta eta_d");
        }
        EvalQuantity::Ratio => {
            let r = advantage_ratio(args.k, args.eta_p, args.eta, args.eta_d)?;
            println!("ratio = {}", r.ratio);
            println!("f_best = {} at phi = {}", r.f_best, r.best_phase);
            println!("f_sql = {}", r.f_sql);
            println!("engine: phase-maximized counting CFI against 2 k eta eta_d");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("FISHERLAB_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0); // 0 lets rayon pick the core count
    if rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .is_err()
    {
        // Pool already installed (only possible in tests); proceed.
    }

    match &cli.command {
        Command::Eval(args) => match eval(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e @ (Error::SingularOutcome(..) | Error::DegeneratePhase(_))) => {
                eprintln!("numerical diagnostic: {e}");
                ExitCode::from(3)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Sweep(args) => match sweep::run(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(message) => {
                eprintln!("error: {message}");
                ExitCode::from(2)
            }
        },
        Command::Validate(args) => match validate::run(args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(4),
            Err(message) => {
                eprintln!("error: {message}");
                ExitCode::from(2)
            }
        },
    }
}
