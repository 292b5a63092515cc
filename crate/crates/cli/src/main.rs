//! `qreduce` — command-line front end: single trajectories, Monte Carlo
//! ensembles, parameter sweeps and the verification suite.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime integration
//! error, 3 verification failure.

mod commands;
mod config;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use config::SharedArgs;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
    VerifyFailed(usize),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::VerifyFailed(_) => 3,
        }
    }
}

impl From<qreduce::Error> for CliError {
    fn from(e: qreduce::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("i/o error: {e}"))
    }
}

#[derive(Parser)]
#[command(
    name = "qreduce",
    version,
    about = "Numerical laboratory for a phase-driven state-vector reduction model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    shared: SharedArgs,

    /// Interaction strengths to sweep, comma-separated
    #[arg(long = "g-grid", value_delimiter = ',')]
    g_grid: Option<Vec<f64>>,

    /// Collapse thresholds to sweep, comma-separated
    #[arg(long = "epsilon-grid", value_delimiter = ',')]
    epsilon_grid: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory and write its time series as CSV
    Trajectory(SharedArgs),
    /// Run a phase-sampled Monte Carlo ensemble and write a JSON report
    Ensemble(SharedArgs),
    /// Sweep g and epsilon, comparing measured and analytic reduction times
    Sweep(SweepArgs),
    /// Run the verification suite and report each check
    Verify,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            eprintln!("{e}");
            return 1;
        }
    };

    let result = match &cli.command {
        Command::Trajectory(shared) => commands::cmd_trajectory(shared),
        Command::Ensemble(shared) => commands::cmd_ensemble(shared),
        Command::Sweep(args) => {
            commands::cmd_sweep(&args.shared, args.g_grid.clone(), args.epsilon_grid.clone())
        }
        Command::Verify => commands::cmd_verify(),
    };

    match result {
        Ok(()) => 0,
        Err(err) => {
            match &err {
                CliError::Config(msg) => eprintln!("error: {msg}"),
                CliError::Runtime(msg) => eprintln!("error: {msg}"),
                CliError::VerifyFailed(count) => {
                    eprintln!("error: {count} verification check(s) failed")
                }
            }
            err.exit_code()
        }
    }
}
