//! Command-line front end for `rabi-a2-core`: single-point spectra, parameter
//! sweeps written as CSV tables with JSON metadata, and the verification
//! suites.

pub mod args;
pub mod config;
pub mod error;
pub mod format;
pub mod presets;
pub mod spectrum;
pub mod sweep;
pub mod verify;

use std::ffi::OsString;

use clap::Parser;
use rabi_a2_core::Truncation;

use crate::args::{Cli, Command, TruncArgs};
use crate::config::ConfigFile;
use crate::error::{CliError, CliResult, EXIT_OK, EXIT_USAGE};

pub use crate::error::{EXIT_BREACH, EXIT_FAILURE, EXIT_UNCONVERGED};

pub const TRUNC_KEYS: [&str; 3] = ["n-max", "rel-tol", "max-doublings"];

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Spectrum(a) => spectrum::execute(&a),
        Command::Sweep(a) => sweep::execute(&a),
        Command::Verify(a) => verify::execute(&a),
        Command::Presets(a) => presets::execute(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Cutoff policy from flags, then the file, then `default`.
pub(crate) fn truncation(cfg: &ConfigFile, flags: &TruncArgs, default: &Truncation) -> CliResult<Truncation> {
    let n_max = cfg.value_or("n-max", flags.n_max, default.n_max())?;
    let rel_tol = cfg.value_or("rel-tol", flags.rel_tol, default.rel_tol())?;
    let doublings = cfg.value_or("max-doublings", flags.max_doublings, default.max_doublings())?;
    Ok(Truncation::new(n_max, rel_tol, doublings)?)
}

pub(crate) fn default_truncation(n_max: usize) -> Truncation {
    Truncation::with_n_max(n_max).expect("positive cutoff")
}

pub(crate) fn positive_count(name: &str, value: usize) -> CliResult<usize> {
    if value == 0 {
        return Err(CliError::usage(format!("--{name} must be at least 1")));
    }
    Ok(value)
}
