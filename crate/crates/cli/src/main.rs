//! `rewl1` — batch experiments and one-shot weighted solves.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on solver
//! failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array1;

use rewl1::config::{ExperimentConfig, ExperimentKind};
use rewl1::experiments::run_experiment;
use rewl1::RunError;
use rewl1_core::convex::{
    solve_weighted_bp, solve_weighted_bpdn, solve_weighted_dantzig, solve_weighted_residual_l1,
    SolveOptions, SolveStatus,
};
use rewl1_core::io::{read_matrix_auto, read_vector_auto, write_vector};
use rewl1_core::model::ProblemInstance;

#[derive(Parser)]
#[command(name = "rewl1", version, about = "Reweighted l1 sparse recovery experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch experiment and write CSV artifacts.
    Run(RunArgs),
    /// Solve a single weighted program from files.
    Solve(SolveArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment name (phase-transition, adaptive-eps, noisy, dantzig,
    /// error-correction, tv-phantom, gabor-pulse).
    experiment: String,
    /// Key-value config file; defaults applied when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trial count override.
    #[arg(long)]
    trials: Option<usize>,
    /// Worker thread count (0 = automatic).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProgramKind {
    Bp,
    Bpdn,
    Dantzig,
    Residual,
}

#[derive(Args)]
struct SolveArgs {
    /// Which weighted program to solve.
    #[arg(value_enum)]
    program: ProgramKind,
    /// Sensing matrix (flat binary f64, or whitespace text with .txt/.csv).
    #[arg(long)]
    matrix: PathBuf,
    /// Observation vector.
    #[arg(long)]
    y: PathBuf,
    /// Weight vector; unit weights when omitted.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Constraint radius for bpdn / dantzig.
    #[arg(long)]
    delta: Option<f64>,
    /// Where to write the solution vector (flat binary f64).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative optimality tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Solve(args) => cmd_solve(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rewl1: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<(), RunError> {
    let kind = ExperimentKind::parse(&args.experiment)?;
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(RunError::io)?;
            let parsed = ExperimentConfig::from_file_text(&text)?;
            if parsed.experiment != kind {
                return Err(RunError::config(format!(
                    "config file is for `{}`, requested `{}`",
                    parsed.experiment.name(),
                    kind.name()
                )));
            }
            parsed
        }
        None => ExperimentConfig::default_for(kind),
    };
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(out) = args.out {
        config.out_dir = out;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(threads) = args.threads {
        config.threads = threads;
    }
    config.validate()?;

    let paths = run_experiment(&config)?;
    for p in paths {
        println!("{}", p.display());
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<(), RunError> {
    let phi = read_matrix_auto(&args.matrix)?;
    let y = read_vector_auto(&args.y)?;
    let (m, n) = phi.dim();
    let problem = ProblemInstance::new(phi, y)?;
    let weight_len = match args.program {
        ProgramKind::Residual => m,
        _ => n,
    };
    let weights = match &args.weights {
        Some(path) => read_vector_auto(path)?,
        None => Array1::ones(weight_len),
    };
    let opts = SolveOptions {
        tol: args.tol,
        ..SolveOptions::default()
    };

    let need_delta = || {
        args.delta.ok_or_else(|| {
            RunError::config("this program requires --delta (nonnegative real)")
        })
    };
    let solution = match args.program {
        ProgramKind::Bp => solve_weighted_bp(&problem, &weights, &opts)?,
        ProgramKind::Bpdn => solve_weighted_bpdn(&problem, &weights, need_delta()?, &opts)?,
        ProgramKind::Dantzig => solve_weighted_dantzig(&problem, &weights, need_delta()?, &opts)?,
        ProgramKind::Residual => solve_weighted_residual_l1(&problem, &weights, &opts)?,
    };

    match solution.status {
        SolveStatus::Optimal => {}
        SolveStatus::MaxIter => {
            return Err(RunError::solver(
                "iteration limit reached before the tolerance was met",
            ));
        }
        SolveStatus::Infeasible => {
            return Err(RunError::solver("the program is infeasible"));
        }
    }

    println!("status: optimal");
    println!("objective: {}", solution.objective);
    match &args.out {
        Some(path) => {
            write_vector(path, &solution.x)?;
            println!("solution written to {}", path.display());
        }
        None => {
            for v in solution.x.iter() {
                println!("{v}");
            }
        }
    }
    Ok(())
}
