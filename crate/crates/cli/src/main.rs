mod commands;
mod error;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exact solutions, symmetry checks, reductions and simulations for diffusive
/// Lotka–Volterra systems.
#[derive(Parser, Debug)]
#[command(name = "dlv", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List catalog entries.
    List,
    /// Show parameters, derived constants, model and steady states of an entry.
    Show {
        id: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run the residual, invariant-surface and tanh checks.
    Verify {
        /// Catalog id (omit with --all).
        id: Option<String>,
        /// Check every catalog entry at its reference parameters.
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        params: ParamArgs,
        /// Sample window `A,B,n`: x in [A, B] on an n×n (t, x) grid.
        #[arg(long)]
        grid: Option<String>,
        /// Relative residual tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Method-of-lines run from closed-form or constant initial data.
    Simulate(SimulateArgs),
    /// Verify or rediscover a tanh-polynomial front.
    Tanh {
        id: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Comma-separated scalars to fix at the entry's values.
        #[arg(long, value_delimiter = ',')]
        fix: Vec<String>,
        /// Comma-separated model scalars to treat as unknowns.
        #[arg(long, value_delimiter = ',')]
        free: Vec<String>,
        /// Number of random Newton starts when solving.
        #[arg(long, default_value_t = 64)]
        starts: usize,
        /// Half-width of the box the starts are drawn from.
        #[arg(long, default_value_t = 3.0)]
        range: f64,
        /// Print the generated coefficient equations.
        #[arg(long)]
        dump: bool,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Reduce an entry through its generating ansatz and check consistency.
    Reduce {
        id: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Sample window `A,B,n` for the consistency check.
        #[arg(long)]
        grid: Option<String>,
        /// Directory for the profile CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// List the constant solutions of a model.
    Steady {
        /// Model TOML file (`lambda`, `a`, `b`).
        #[arg(long, conflicts_with = "solution")]
        model: Option<PathBuf>,
        /// Use the model of a catalog entry.
        #[arg(long)]
        solution: Option<String>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Write surface CSVs for a figure preset (4-1, 6-1, 6-2, 7-1, 7-2).
    Figure {
        fig: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Samples in x.
        #[arg(long, default_value_t = 61)]
        nx: usize,
        /// Samples in t over [0, 3].
        #[arg(long, default_value_t = 31)]
        nt: usize,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct ParamArgs {
    /// Parameter override `name=value` (rationals like 3/2 allowed); repeatable.
    #[arg(long = "param", value_name = "K=V")]
    param: Vec<String>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Catalog entry providing the model, initial data and reference.
    #[arg(long, conflicts_with_all = ["spec", "model"])]
    solution: Option<String>,
    /// Solution spec TOML (`id` plus a `[params]` table).
    #[arg(long, conflicts_with = "model")]
    spec: Option<PathBuf>,
    /// Model TOML; needs --init.
    #[arg(long, requires = "init")]
    model: Option<PathBuf>,
    /// Constant initial values `u1,u2[,u3]` for --model runs.
    #[arg(long, value_delimiter = ',')]
    init: Vec<f64>,
    /// Named setup: front | competition | three-component.
    #[arg(long, conflicts_with_all = ["solution", "spec", "model"])]
    preset: Option<String>,
    #[command(flatten)]
    params: ParamArgs,
    /// Domain and resolution `A,B,nx`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    /// Final time.
    #[arg(long = "T")]
    t_final: Option<f64>,
    /// rk4 | imex.
    #[arg(long)]
    scheme: Option<String>,
    /// Boundary handling: neumann | dirichlet (initial end values held) |
    /// exact (closed-form end values).
    #[arg(long)]
    bc: Option<String>,
    /// Keep every n-th step in the snapshot CSV.
    #[arg(long, default_value_t = 100)]
    stride: usize,
    /// Directory for snapshots.csv and manifest.txt.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => commands::list(),
        Command::Show { id, params } => commands::show(&id, &params.param),
        Command::Verify { id, all, params, grid, tol } => commands::verify(id.as_deref(), all, &params.param, grid.as_deref(), tol),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Tanh { id, params, fix, free, starts, range, dump, tol } => {
            commands::tanh(&id, &params.param, &fix, &free, starts, range, dump, tol)
        }
        Command::Reduce { id, params, grid, out, tol } => {
            commands::reduce(&id, &params.param, grid.as_deref(), out.as_deref(), tol)
        }
        Command::Steady { model, solution, params } => commands::steady(model.as_deref(), solution.as_deref(), &params.param),
        Command::Figure { fig, out, nx, nt } => commands::figure(&fig, &out, nx, nt),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
