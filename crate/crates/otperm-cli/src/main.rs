//! `otperm` — permutation tests whose p-values come from optimally
//! transporting the permutation distribution onto a regular grid.
//!
//! Three subcommands: `test` runs one test on a CSV data set, `grid` prints
//! grid points, `simulate` drives the built-in power-study catalog.
//!
//! Exit codes: 0 success, 2 data error, 64 usage/configuration error.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

mod commands;
mod config;
mod input;

/// Errors surfaced to the shell, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Wrong flags, unknown names, inconsistent configuration (exit 64).
    Usage(String),
    /// Unreadable or malformed data (exit 2).
    Data(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }
}

impl From<otperm::Error> for CliError {
    fn from(e: otperm::Error) -> Self {
        match e {
            otperm::Error::InvalidConfig(_) => CliError::Usage(e.to_string()),
            otperm::Error::InvalidInput(_) | otperm::Error::Degenerate(_) => {
                CliError::Data(e.to_string())
            }
        }
    }
}

#[derive(Parser)]
#[command(name = "otperm", version, about = "Multivariate permutation tests via optimal transport")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one permutation test on a CSV file with header `value,group`
    Test(TestArgs),
    /// Print the points of a grid, one CSV row per point
    Grid(GridArgs),
    /// Run built-in simulation scenarios and report rejection rates
    Simulate(SimArgs),
}

// Every value-carrying flag is optional at parse time so that a `--config`
// file can supply it; explicit flags always win. Requiredness is enforced
// after the merge.
#[derive(clap::Args, Default)]
struct TestArgs {
    /// Input CSV with header `value,group`
    #[arg(long, short = 'i')]
    input: Option<PathBuf>,
    /// Statistic: pairwise-t, helmert-t, or mean-logvar
    #[arg(long)]
    stat: Option<String>,
    /// Method: t-P, t-N, t-P+, t-N+, p-P+, p-N+, combine-{tippett,fisher,liptak}
    #[arg(long)]
    method: Option<String>,
    /// Rings of a product grid
    #[arg(long = "nR")]
    n_r: Option<usize>,
    /// Directions per ring of a product grid
    #[arg(long = "nS")]
    n_s: Option<usize>,
    /// Center points of a product grid (0 or 1)
    #[arg(long = "n0")]
    n_0: Option<usize>,
    /// Number of permutations (derived from the grid for product methods)
    #[arg(long = "B")]
    b: Option<usize>,
    /// Significance level (default 0.05)
    #[arg(long)]
    alpha: Option<f64>,
    /// Master seed (default 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Generating vector for lattice direction sets, e.g. `1,610`
    #[arg(long)]
    h: Option<String>,
    /// Low-discrepancy source: builtin or halton
    #[arg(long)]
    source: Option<String>,
    /// Output format: json (default), csv, or human
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file with the same keys as the flags
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(clap::Args, Default)]
struct GridArgs {
    /// Grid kind: product or nonproduct
    #[arg(long)]
    kind: Option<String>,
    /// Dimension
    #[arg(long)]
    d: Option<usize>,
    /// Rings (product grids)
    #[arg(long = "nR")]
    n_r: Option<usize>,
    /// Directions per ring (product grids)
    #[arg(long = "nS")]
    n_s: Option<usize>,
    /// Center points, 0 or 1 (product grids)
    #[arg(long = "n0")]
    n_0: Option<usize>,
    /// Number of points minus one (non-product grids)
    #[arg(long = "B")]
    b: Option<usize>,
    /// Orthant: full (default) or positive
    #[arg(long)]
    orthant: Option<String>,
    /// Generating vector, e.g. `1,610`
    #[arg(long)]
    h: Option<String>,
    /// Low-discrepancy source: builtin or halton
    #[arg(long)]
    source: Option<String>,
    /// Write the points here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file with the same keys as the flags
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(clap::Args, Default)]
struct SimArgs {
    /// Scenario name, or `all` for the whole catalog
    #[arg(long)]
    scenario: Option<String>,
    /// Replications per scenario (default: the scenario's own setting)
    #[arg(long)]
    reps: Option<usize>,
    /// Master seed (default: the scenario's own setting)
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file with the same keys as the flags
    #[arg(long)]
    config: Option<PathBuf>,
}

fn cap_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("OTPERM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::usage(format!("OTPERM_THREADS must be a positive integer, got {raw:?}"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::usage(format!("cannot configure the thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    cap_threads()?;
    match cli.command {
        Cmd::Test(args) => commands::cmd_test(args),
        Cmd::Grid(args) => commands::cmd_grid(args),
        Cmd::Simulate(args) => commands::cmd_simulate(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(64);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(64)
        }
    }
}
