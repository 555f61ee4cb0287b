use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod settings;

use settings::Settings;

/// Three-vortex dynamics, Pauli coordinates and shape-sphere portraits.
#[derive(Debug, Parser)]
#[command(name = "trivortex", version, about)]
struct Cli {
    /// JSON file supplying any of the options below (command-line values win).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the full system and write the trajectory as CSV.
    Simulate(SimulateArgs),
    /// Integrate the reduced flow on the shape sphere and write CSV.
    SimulateReduced(ReducedArgs),
    /// Run both flows from one configuration and report their deviation as JSON.
    Compare(CompareArgs),
    /// Sample the reduced energy on a chart and write a CSV grid or SVG contours.
    Portrait(PortraitArgs),
    /// Check the Pauli relations and the Poisson-map property; print JSON.
    Verify(VerifyArgs),
    /// Print every stage of the canonical-transformation chain as JSON.
    Transforms(TransformsArgs),
    /// List relative equilibria on a leaf as JSON.
    Equilibria(EquilibriaArgs),
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// Vortex strengths g1,g2,g3.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, num_args = 1)]
    pub gammas: Option<Vec<f64>>,
    /// Family parameter x1,x2,x3 in the plane S_Gamma (defaults to the special basis).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Option<Vec<f64>>,
}

#[derive(Debug, Args, Default)]
pub struct Tolerances {
    #[arg(long, allow_negative_numbers = true)]
    pub rtol: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub atol: Option<f64>,
    /// Sample interval; every accepted step is written when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Positions x1,y1,x2,y2,x3,y3.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub z: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    #[command(flatten)]
    pub tol: Tolerances,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReducedArgs {
    #[command(flatten)]
    pub common: Common,
    /// Pauli coordinates a0,a1,a2,a3 of the initial point.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub a: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    #[command(flatten)]
    pub tol: Tolerances,
    /// Skip the projection back onto the sphere after each step.
    #[arg(long)]
    pub no_renormalize: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub z: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    #[command(flatten)]
    pub tol: Tolerances,
}

#[derive(Debug, Clone, Copy, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartArg {
    Phi,
    Alpha,
}

#[derive(Debug, Args)]
pub struct PortraitArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, value_enum)]
    pub chart: Option<ChartArg>,
    #[arg(long)]
    pub nu: Option<usize>,
    #[arg(long)]
    pub nv: Option<usize>,
    /// Contour levels; evenly spaced levels over the sampled range when omitted.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub levels: Option<Vec<f64>>,
    /// Number of automatic levels.
    #[arg(long)]
    pub n_levels: Option<usize>,
    /// Output file; `.svg` renders contours, anything else gets the CSV grid.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TransformsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub z: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct EquilibriaArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Resolution of the coarse scan.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] trivortex::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if !e.is_validation() => 3,
            CliError::Numerical(_) => 3,
            _ => 2,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    match cli.command {
        Command::Simulate(a) => commands::simulate(a, &file),
        Command::SimulateReduced(a) => commands::simulate_reduced(a, &file),
        Command::Compare(a) => commands::compare(a, &file),
        Command::Portrait(a) => commands::portrait(a, &file),
        Command::Verify(a) => commands::verify(a, &file),
        Command::Transforms(a) => commands::transforms(a, &file),
        Command::Equilibria(a) => commands::equilibria(a, &file),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
