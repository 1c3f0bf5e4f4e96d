use rabi_a2_core::sweeps::{self, SweepBase, SweepSpec, PRESET_NAMES};
use serde::Serialize;

use crate::args::PresetsArgs;
use crate::error::{CliResult, EXIT_OK};
use crate::format;

#[derive(Debug, Clone, Serialize)]
pub struct PresetEntry {
    pub name: String,
    pub spec: SweepSpec,
}

pub fn entries() -> CliResult<Vec<PresetEntry>> {
    PRESET_NAMES
        .iter()
        .map(|&name| {
            Ok(PresetEntry {
                name: name.to_string(),
                spec: sweeps::preset(name)?,
            })
        })
        .collect()
}

fn describe(spec: &SweepSpec) -> String {
    let grid = spec.grid();
    let (first, last) = (grid[0], grid[grid.len() - 1]);
    let base = match spec.base() {
        SweepBase::Coupling { omega, c } => format!("omega_a = omega_c = {omega}, C = {c}"),
        SweepBase::RScheme(s) => format!(
            "omega = {}, g0 = {}, C = {}, schedule {}",
            s.omega0(),
            s.g0(),
            s.c(),
            s.schedule().name()
        ),
    };
    format!(
        "{} in [{first}, {last}] ({} points), {} levels, {base}",
        spec.axis().name(),
        grid.len(),
        spec.levels()
    )
}

pub fn execute(args: &PresetsArgs) -> CliResult<i32> {
    let entries = entries()?;
    if args.json {
        format::emit(None, &format::to_json(&entries)?)?;
    } else {
        let text: String = entries
            .iter()
            .map(|e| format!("{:<6} {}\n", e.name, describe(&e.spec)))
            .collect();
        format::emit(None, &text)?;
    }
    Ok(EXIT_OK)
}
