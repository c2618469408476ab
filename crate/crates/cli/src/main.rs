//! `resetld`: simulate the reset process, evaluate rate functions, and run
//! large-deviation convergence studies. All results are written as files
//! under `--out`, preceded by a `manifest.json` that can be replayed.

mod commands;
mod figures;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub use commands::Failure;

#[derive(Debug, Parser)]
#[command(name = "resetld", version, about = "Brownian motion with Poissonian resetting: simulation and large deviations")]
pub struct Cli {
    /// Run seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output directory (must exist).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Artifacts to write, comma separated.
    #[arg(long, global = true, value_delimiter = ',', default_value = "csv,json,svg")]
    format: Vec<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Functional {
    Reset,
    Wiener,
    Poisson,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Simulate one trajectory of xi_n (trajectory CSV, reset sidecar, plot).
    Simulate {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = resetld::process::DEFAULT_GRID_POINTS)]
        grid_points: usize,
        /// Apply the Brownian-bridge supremum correction.
        #[arg(long)]
        bridge: bool,
    },
    /// Evaluate a rate functional on a path JSON file.
    Rate {
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, value_enum, default_value_t = Functional::Reset)]
        functional: Functional,
    },
    /// Tabulate the supremum rate over an x grid and plot it.
    SupCurve {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0)]
        x_min: f64,
        #[arg(long, default_value_t = 3.0)]
        x_max: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
        /// Explicit x values (overrides the uniform grid).
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
        /// Levels whose optimal paths are drawn in the companion plot.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5,2,2.5")]
        paths_for: Vec<f64>,
    },
    /// Emit the optimal flat-then-ramp path for level x.
    OptimalPath {
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Recover the supremum rate by variational minimization.
    Minimize {
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 64)]
        segments: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Convergence table of -(1/n) ln P(sup |xi_n| >= x).
    Verify {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        x: f64,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
        n: Vec<u32>,
        #[arg(long, default_value_t = 1_000_000)]
        crude_trials: u64,
        #[arg(long, default_value_t = 2000)]
        particles: usize,
        #[arg(long, default_value_t = 10)]
        replicates: usize,
        /// Splitting levels (default: ceil(n I_sup(x) / 1.5), at most 40).
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, default_value_t = 1e-4)]
        crude_threshold: f64,
        #[arg(long, default_value_t = resetld::process::DEFAULT_GRID_POINTS)]
        grid_points: usize,
        /// Disable the Brownian-bridge supremum correction.
        #[arg(long)]
        no_bridge: bool,
    },
    /// Estimate L1-tube probabilities around a path.
    Tube {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, value_delimiter = ',', default_value = "4,8")]
        n: Vec<u32>,
        /// Path JSON file; defaults to f(t) = slope * t.
        #[arg(long)]
        path: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        slope: f64,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = resetld::process::DEFAULT_GRID_POINTS)]
        grid_points: usize,
    },
    /// Re-run the command recorded in a manifest into `--out`.
    #[serde(skip)]
    Replay { manifest: PathBuf },
}

/// Written to `manifest.json` before any result file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub artifact: String,
    pub version: String,
    pub seed: u64,
    pub formats: Vec<Format>,
    pub command: Command,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli.command, cli.seed, cli.out, cli.format) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
