//! Text renderings shared by the writers.

use std::io::Write;
use std::path::{Path, PathBuf};

use rabi_a2_core::sweeps::{SweepResult, SweepRow};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const SIGNIFICANT_DIGITS: usize = 12;

pub const CSV_HEADER: [&str; 7] = [
    "axis_name",
    "axis_value",
    "level_index",
    "energy",
    "parity",
    "n_max_used",
    "converged",
];

/// `x` with `digits` significant digits: fixed notation for moderate
/// magnitudes, scientific otherwise. Negative zero prints as `0`.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

pub fn energy(x: f64) -> String {
    significant(x, SIGNIFICANT_DIGITS)
}

/// Rows ordered by axis value, then energy, then level index.
pub fn sorted_rows(rows: &[SweepRow]) -> Vec<SweepRow> {
    let mut rows = rows.to_vec();
    rows.sort_by(|a, b| {
        a.axis_value
            .total_cmp(&b.axis_value)
            .then(a.energy.total_cmp(&b.energy))
            .then(a.level_index.cmp(&b.level_index))
    });
    rows
}

pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> CliResult<()> {
    let axis = result.metadata.axis.name();
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in sorted_rows(&result.rows) {
        writer.write_record([
            axis.to_string(),
            row.axis_value.to_string(),
            row.level_index.to_string(),
            energy(row.energy),
            row.parity.sign().to_string(),
            row.n_max_used.to_string(),
            row.converged.to_string(),
        ])?;
    }
    writer.flush().map_err(|e| CliError::io("<csv>", e))?;
    Ok(())
}

/// `table.csv` -> `table.json`.
pub fn metadata_path(csv_path: &Path) -> CliResult<PathBuf> {
    if csv_path.extension().is_some_and(|e| e == "json") {
        return Err(CliError::usage(
            "sweep CSV output must not end in .json; the metadata file takes that name",
        ));
    }
    Ok(csv_path.with_extension("json"))
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}
