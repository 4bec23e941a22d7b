//! Batch driver: featurize a dataset, train a Lasso predictor, solve for a graph with a
//! target property, verify a graph.
//!
//! Exit codes: 0 success, 1 verification failed, 2 usage or input error,
//! 3 infeasible, 4 solver failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ProjectConfig;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Infeasible,
    Solver(String),
    Failed,
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Failed => 1,
            CliError::Input(_) => 2,
            CliError::Infeasible => 3,
            CliError::Solver(_) => 4,
        }
    }
}

#[derive(Parser)]
#[command(name = "chemlp", version, about = "Descriptors, Lasso prediction and MILP inverse design for chemical graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write features.csv and space.json for the dataset into the output directory.
    Featurize {
        #[arg(long)]
        config: PathBuf,
    },
    /// Cross-validate the lambda grid and write the best predictor.
    Train {
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve for a graph meeting the specification whose predicted property lies in
    /// [y-lo, y-hi], given in the property's units.
    Infer {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        y_lo: f64,
        #[arg(long, allow_negative_numbers = true)]
        y_hi: f64,
    },
    /// Featurize, predict and check a graph (JSON or SDF) against a specification.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        predictor: PathBuf,
        /// Defaults to space.json next to the predictor.
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true, requires = "y_hi")]
        y_lo: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "y_lo")]
        y_hi: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Featurize { config } => commands::run_featurize(&ProjectConfig::load(&config)?),
        Command::Train { config } => commands::run_train(&ProjectConfig::load(&config)?),
        Command::Infer { config, y_lo, y_hi } => commands::run_infer(&ProjectConfig::load(&config)?, y_lo, y_hi),
        Command::Verify { graph, spec, predictor, space, y_lo, y_hi } => {
            let space = space.unwrap_or_else(|| predictor.with_file_name("space.json"));
            commands::run_verify(&graph, &spec, &predictor, &space, y_lo.zip(y_hi))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Input(m) => eprintln!("error: {m}"),
                CliError::Infeasible => eprintln!("status: infeasible"),
                CliError::Solver(m) => eprintln!("solver failure: {m}"),
                CliError::Failed => eprintln!("verification failed"),
            }
            ExitCode::from(e.code())
        }
    }
}
