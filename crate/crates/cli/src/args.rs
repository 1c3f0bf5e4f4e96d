use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "rabi-a2",
    version,
    about = "Spectra, sweeps and identity checks for the quantum Rabi model with an A^2 term"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Converged low-lying spectrum and SUSY classification at one point
    Spectrum(SpectrumArgs),
    /// Level table over a coupling or r-scheme grid (CSV plus JSON metadata)
    Sweep(SweepArgs),
    /// Run numerical oracles; exit 4 when any tolerance is breached
    Verify(VerifyArgs),
    /// List the canned figure configurations
    Presets(PresetsArgs),
}

/// Cutoff and convergence policy.
#[derive(Debug, Args, Clone, Default)]
pub struct TruncArgs {
    /// Starting Fock cutoff (raised automatically for strong coupling)
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Relative level change accepted on doubling the cutoff
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Maximum number of cutoff doublings
    #[arg(long)]
    pub max_doublings: Option<u32>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// key = value file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub omega_a: Option<f64>,
    #[arg(long)]
    pub omega_c: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    /// Quadratic (A^2) coefficient
    #[arg(long = "C")]
    pub c: Option<f64>,
    /// Number of levels
    #[arg(short = 'k', long = "levels")]
    pub k: Option<usize>,
    /// Scalar shift: none, or paper (g~^2 / w(g))
    #[arg(long, value_parser = ["none", "paper"])]
    pub shift: Option<String>,
    #[command(flatten)]
    pub trunc: TruncArgs,
    /// JSON output file (stdout when absent)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// fig1a, fig1b, fig2a or fig2b
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, value_parser = ["g", "r"])]
    pub axis: Option<String>,
    /// start:step:end, a comma list, or a single value
    #[arg(long)]
    pub grid: Option<String>,
    /// omega_a = omega_c for g sweeps; omega for r sweeps
    #[arg(long)]
    pub omega: Option<f64>,
    /// Coupling scale g0 of the r-scheme (defaults to omega)
    #[arg(long)]
    pub g0: Option<f64>,
    #[arg(long = "C")]
    pub c: Option<f64>,
    /// r-scheme schedule: linear, quadratic or smoothstep
    #[arg(long)]
    pub schedule: Option<String>,
    /// Levels per grid point
    #[arg(short = 'k', long = "levels")]
    pub k: Option<usize>,
    #[arg(long, value_parser = ["none", "paper"])]
    pub shift: Option<String>,
    #[command(flatten)]
    pub trunc: TruncArgs,
    /// Worker threads (defaults to available cores)
    #[arg(short, long)]
    pub jobs: Option<usize>,
    /// csv (table plus .json metadata) or json (single document)
    #[arg(long, value_parser = ["csv", "json"])]
    pub format: Option<String>,
    /// Output file (defaults to <preset>.csv or sweep.csv)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = ["eq2", "eq3", "limits", "all"])]
    pub suite: Option<String>,
    /// Limit monitor to run (all three when absent)
    #[arg(long, value_parser = ["eq4", "eq5", "eq6"])]
    pub kind: Option<String>,
    #[arg(long)]
    pub omega_a: Option<f64>,
    #[arg(long)]
    pub omega_c: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long = "C")]
    pub c: Option<f64>,
    #[arg(short = 'k', long = "levels")]
    pub k: Option<usize>,
    /// Fock levels kept in the projected operator residual
    #[arg(long)]
    pub k_subspace: Option<usize>,
    /// Comma list of monitor axis values (g, or r for eq6)
    #[arg(long)]
    pub axis_values: Option<String>,
    #[arg(long)]
    pub schedule: Option<String>,
    #[command(flatten)]
    pub trunc: TruncArgs,
    /// JSON report file (stdout when absent)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PresetsArgs {
    /// Print the full specs as JSON
    #[arg(long)]
    pub json: bool,
}
