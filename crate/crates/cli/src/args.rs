//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "flowlab", version, about = "Spectral flow of the Dirichlet Laplacian with nodal delta potentials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalue table: rows m = 1..n, one column per sigma.
    Table(TableArgs),
    /// Limit amplitude matrices and the diff_val / diff_vec metrics.
    Limits(LimitsArgs),
    /// SVG plot of one eigenfunction.
    Plot(PlotArgs),
    /// Node-value ratio u_m(x_1) / u_m(x_2) along the flow of a background potential.
    Ratio(RatioArgs),
    /// Run the invariant suites and report pass/fail.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    Analytic,
    Cheb,
    Shoot,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotSolver {
    Analytic,
    Cheb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Potential {
    /// V = 0
    Flat,
    /// V = 20 on (0, 1/2), 0 elsewhere
    Step,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Write the result to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// With --out, also echo the result to stdout.
    #[arg(long, requires = "out")]
    pub tee: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub n: usize,
    /// Comma-separated delta strengths; scientific notation allowed.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 10.0, 1e3, 1e5, 1e7])]
    pub sigmas: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Solver::Analytic)]
    pub solver: Solver,
    /// Chebyshev points per edge.
    #[arg(long = "N", default_value_t = 32)]
    pub points: usize,
    /// Compare against the published tables instead of printing the grid.
    #[arg(long)]
    pub check: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LimitsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1e7)]
    pub sigma: f64,
    #[arg(long = "N", default_value_t = 32)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub sigma: f64,
    /// Number of uniform sample points.
    #[arg(long, default_value_t = 513)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = PlotSolver::Analytic)]
    pub solver: PlotSolver,
    #[arg(long = "N", default_value_t = 32)]
    pub cheb_points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RatioArgs {
    #[arg(long, value_enum)]
    pub potential: Potential,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0])]
    pub sigmas: Vec<f64>,
    /// `.svg` renders the curve, anything else gets CSV.
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Level::Quick)]
    pub level: Level,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}
