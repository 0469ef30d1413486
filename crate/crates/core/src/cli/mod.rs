//! The `fht` command-line tool.
//!
//! Exit codes: 0 when every check passes, 1 on a threshold breach or numerical error,
//! 2 on a usage error.

mod commands;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use output::{emit, summary_path, Cell, Output, Table};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "fht",
    version,
    about = "Finite Hilbert transform and root-flow experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Grid size or polynomial degree; `roots` accepts a comma-separated sweep
    #[arg(long, global = true, value_delimiter = ',')]
    pub n: Vec<usize>,

    /// Secondary grid: circle samples (verify), PDE cells (flow), Stieltjes nodes (roots)
    #[arg(long, global = true)]
    pub grid: Option<usize>,

    /// Seed for randomized trials
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Output file; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Pass/fail threshold of the command
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate f and Hf for a catalog function or a sample file
    Transform(TransformArgs),
    /// Check the Parseval identity, the null space and the circle formula on random trials
    Verify(VerifyArgs),
    /// Roots of orthogonal polynomials and their distance to the arcsine law
    Roots(RootsArgs),
    /// Evolve the root-density equation and compare with derivative roots
    Flow(FlowArgs),
    /// Solve Hf = g
    Airfoil(AirfoilArgs),
    /// Outer-norm probe on bumps of decreasing width
    Probe(ProbeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selector {
    /// c / sqrt(1-x^2)
    NullFamily,
    /// T_k(x) / sqrt(1-x^2)
    Tk,
    /// f = 1 on (-1, 1)
    Indicator,
    /// Smooth bump with given center and support length
    Bump,
    /// Samples of f on the Chebyshev grid, one value per line
    File,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TransformArgs {
    #[arg(long, value_enum)]
    pub selector: Selector,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub c: f64,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub center: f64,
    #[arg(long, default_value_t = 1.0)]
    pub width: f64,
    /// Sample file for `--selector file`
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Evaluate at these points instead of the grid nodes
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub at: Vec<f64>,
    /// Fail on an under-resolved input instead of warning
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Maximum polynomial degree of the Parseval trials
    #[arg(long, default_value_t = 200)]
    pub degree: usize,
    /// Number of smooth test functions for the circle check
    #[arg(long, default_value_t = 20)]
    pub circle_functions: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub circle_tol: f64,
    /// Give every Parseval trial a nonzero mean and check the corrected identity
    #[arg(long)]
    pub nonzero_mean: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightId {
    Chebyshev,
    Legendre,
    Jacobi,
    Hermite,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WeightArgs {
    #[arg(long, value_enum, default_value_t = WeightId::Chebyshev)]
    pub weight: WeightId,
    /// Jacobi exponent of (1-x)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Jacobi exponent of (1+x)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RootsArgs {
    #[command(flatten)]
    pub weight: WeightArgs,
    /// Build the recurrence from the weight by the discretized Stieltjes procedure
    #[arg(long)]
    pub stieltjes: bool,
    /// Include wall-clock runtimes (output is then not reproducible)
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FlowArgs {
    #[command(flatten)]
    pub weight: WeightArgs,
    /// Flow time; the comparison uses floor(t n) derivatives
    #[arg(long, default_value_t = 0.5)]
    pub t: f64,
    #[arg(long, default_value_t = crate::rootflow::DEFAULT_DT)]
    pub dt: f64,
    /// Extra snapshot times in [0, t]
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Vec<f64>,
    /// Histogram bins for the derivative roots
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
    #[arg(long, default_value_t = 0.02)]
    pub mass_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rhs {
    /// g = 1
    One,
    /// g = 0
    Zero,
    /// g = U_k
    Uk,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AirfoilArgs {
    #[arg(long, value_enum)]
    pub g: Rhs,
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    /// Null-direction coefficient of the second solution column
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProbeArgs {
    /// Support lengths of the centered bumps
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.5, 0.25, 0.125])]
    pub widths: Vec<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Numerical(Error::InvalidArgument(_)) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

/// A command's resolved configuration, output and default format.
pub struct Run {
    pub config: serde_json::Value,
    pub output: Output,
    pub default_format: Format,
}

pub fn execute(cli: &Cli) -> Result<Run, CliError> {
    let c = &cli.common;
    match &cli.command {
        Command::Transform(a) => commands::transform(c, a),
        Command::Verify(a) => commands::verify(c, a),
        Command::Roots(a) => commands::roots(c, a),
        Command::Flow(a) => commands::flow(c, a),
        Command::Airfoil(a) => commands::airfoil(c, a),
        Command::Probe(a) => commands::probe(c, a),
    }
}

/// Parse, run and write; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = execute(&cli).and_then(|run| {
        let format = cli.common.format.unwrap_or(run.default_format);
        emit(&run.output, &run.config, format, cli.common.out.as_deref())?;
        Ok(run.output.failures)
    });
    match result {
        Ok(failures) if failures.is_empty() => EXIT_OK,
        Ok(failures) => {
            for f in failures {
                eprintln!("check failed: {f}");
            }
            EXIT_FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
