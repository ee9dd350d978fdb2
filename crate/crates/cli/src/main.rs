//! `wsurf` command-line front end.

mod commands;
mod config;
mod output;
mod stages;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "wsurf", version, about = "Space-like Weingarten surfaces in Minkowski 3-space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a linear Weingarten relation.
    Classify(ClassifyArgs),
    /// Solve the natural PDE of the configured class.
    Solve(RunArgs),
    /// Solve, then integrate the frame equations and write the mesh.
    Reconstruct(RunArgs),
    /// Solve, reconstruct and check the Gauss-Codazzi residuals.
    Verify(RunArgs),
    /// Offset the configured surface along its normal.
    Parallel(ParallelArgs),
    /// Run every stage and write all artifacts.
    Pipeline(RunArgs),
    /// Refinement study over at least three grid levels.
    Convergence(ConvergenceArgs),
    /// Write the mesh and all intermediate fields.
    Export(RunArgs),
}

#[derive(Args, Debug, Default)]
#[command(allow_negative_numbers = true)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Fractional form ν1 = (Aν2 + B)/(Cν2 + D).
    #[arg(long = "A", conflicts_with_all = ["alpha", "beta", "gamma", "delta"])]
    pub a: Option<f64>,
    #[arg(long = "B")]
    pub b: Option<f64>,
    #[arg(long = "C")]
    pub c: Option<f64>,
    #[arg(long = "D")]
    pub d: Option<f64>,
    /// Also emit the Euclidean counterpart of the canonical PDE.
    #[arg(long)]
    pub euclidean: bool,
    /// Read coefficients from the `[relation]` table; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MeshArg {
    Obj,
    Ply,
    Both,
}

#[derive(Args, Debug, Clone, Default)]
#[command(allow_negative_numbers = true)]
pub struct RunArgs {
    /// TOML run configuration.
    pub config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Nodes per axis (overrides `grid.n`, `grid.nu` and `grid.nv`).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub newton_tol: Option<f64>,
    /// Mesh format (overrides `output.mesh`).
    #[arg(long, value_enum)]
    pub mesh: Option<MeshArg>,
    /// Use λ from a CSV file (`u,v,value`) instead of solving.
    #[arg(long)]
    pub lambda: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct ParallelArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Offset distance; repeat for a family (replaces `parallel.offsets`).
    #[arg(long = "offset")]
    pub offsets: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Comma-separated u-axis node counts (replaces `convergence.levels`).
    #[arg(long, value_delimiter = ',')]
    pub levels: Vec<usize>,
    /// Print the table as JSON.
    #[arg(long)]
    pub json: bool,
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("WSURF_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| format!("WSURF_THREADS must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err("WSURF_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { stages::EXIT_USAGE } else { stages::EXIT_OK };
            return ExitCode::from(code as u8);
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(stages::EXIT_USAGE as u8);
    }
    let result = match cli.command {
        Command::Classify(a) => commands::classify(&a),
        Command::Solve(a) => commands::solve(&a),
        Command::Reconstruct(a) => commands::reconstruct(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Parallel(a) => commands::parallel(&a),
        Command::Pipeline(a) => commands::pipeline(&a),
        Command::Convergence(a) => commands::convergence(&a),
        Command::Export(a) => commands::export(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
