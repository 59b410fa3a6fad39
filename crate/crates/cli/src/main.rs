//! `orbitope`: membership, support, sampling, cross-sections and symbolic
//! boundary computations from the command line.

mod body;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn unsupported(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Boundary {
    #[value(name = "g2-6")]
    G26,
    #[value(name = "g2-7")]
    G27,
}

#[derive(Debug, Parser)]
#[command(name = "orbitope", version, about = "Orbitope membership oracles and boundary computations")]
struct Cli {
    /// Membership tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format (default depends on the command).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test points (JSON lines, `-` for stdin) for membership in a body.
    Membership {
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        points: PathBuf,
    },
    /// Evaluate the support function at a linear functional.
    Support {
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        functional: PathBuf,
    },
    /// Sample extreme points (orbit or curve points) of a body.
    Sample {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Membership over a grid in an affine 2- or 3-dimensional patch.
    CrossSection {
        #[arg(long)]
        job: PathBuf,
    },
    /// Expand a boundary polynomial symbolically.
    Expand {
        #[arg(long, value_enum)]
        boundary: Boundary,
        /// Write the canonical polynomial text here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Discriminant of a ternary quartic (up to a fixed scalar).
    Discriminant {
        #[arg(long)]
        quartic: PathBuf,
        /// Print the exact rational value.
        #[arg(long)]
        exact: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    let result = match &cli.command {
        Command::Membership { body, points } => {
            commands::membership(&mut out, body, points, cli.tol, cli.format.unwrap_or(Format::Json))
        }
        Command::Support { body, functional } => commands::support(&mut out, body, functional),
        Command::Sample { body, count } => {
            commands::sample(&mut out, body, *count, cli.seed, cli.format.unwrap_or(Format::Csv))
        }
        Command::CrossSection { job } => {
            commands::cross_section(&mut out, job, cli.tol, cli.format.unwrap_or(Format::Csv))
        }
        Command::Expand { boundary, output } => {
            commands::expand(&mut out, *boundary, output.as_deref(), cli.format.unwrap_or(Format::Csv))
        }
        Command::Discriminant { quartic, exact } => {
            commands::discriminant(&mut out, quartic, *exact, cli.format.unwrap_or(Format::Csv))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
