use std::path::PathBuf;
use std::process;

use automorph_cli::{exit, parse_grid, run, Command, GridConfig, RunConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "automorph",
    version,
    about = "Bounded almost automorphic solutions via exponential dichotomies"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Ergodic mean of a signal.
    Mean(CommonArgs),
    /// Bounded solution of a linear, nonlinear or delayed problem.
    Solve(CommonArgs),
    /// Cross-module invariant checks.
    Verify(CommonArgs),
    /// Lasota–Wazewska pipeline.
    Lasota(CommonArgs),
    /// Translation numbers and bounded antiderivative of a signal.
    AaTest(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid as t0,t1,dt (overrides grid).
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridConfig>,
    /// Tolerance override: mean_tol for `mean`, fp_tol otherwise.
    #[arg(long)]
    tol: Option<f64>,
}

fn main() {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Mean(a) => (Command::Mean, a),
        Cmd::Solve(a) => (Command::Solve, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Lasota(a) => (Command::Lasota, a),
        Cmd::AaTest(a) => (Command::AaTest, a),
    };
    let code = match load(command, &args).and_then(|(cfg, out)| run(command, &cfg, &out)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit::CONFIG
        }
    };
    process::exit(code);
}

fn load(command: Command, args: &CommonArgs) -> Result<(RunConfig, PathBuf), automorph_cli::CliError> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(grid) = args.grid {
        cfg.grid = grid;
    }
    if let Some(tol) = args.tol {
        match command {
            Command::Mean => cfg.tolerances.mean_tol = tol,
            _ => cfg.tolerances.fp_tol = tol,
        }
    }
    cfg.validate()?;
    let out = args.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
    Ok((cfg, out))
}
