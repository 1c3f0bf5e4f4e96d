use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use rabi_a2_core::sweeps::{self, Asymptote, Axis, ShiftMode, SweepBase, SweepResult, SweepSpec};
use rabi_a2_core::{LimitHamiltonian, ModelParams, RScheme, Schedule, SusyClass};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::SweepArgs;
use crate::config::ConfigFile;
use crate::error::{CliError, CliResult, EXIT_OK, EXIT_UNCONVERGED};
use crate::format;

const KEYS: [&str; 12] = [
    "preset", "axis", "grid", "omega", "g0", "C", "schedule", "levels", "shift", "jobs", "format", "output",
];
const PRESET_FIXED: [&str; 5] = ["axis", "omega", "g0", "C", "schedule"];

/// `start:step:end` (inclusive), `a,b,c`, or a single value.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| CliError::usage(format!("grid value '{}': {e}", s.trim())))
    };
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::usage("grid range must be start:step:end"));
        }
        return Ok(sweeps::stepped(
            number(parts[0])?,
            number(parts[1])?,
            number(parts[2])?,
        )?);
    }
    text.split(',').map(number).collect()
}

pub fn parse_shift(name: &str) -> CliResult<ShiftMode> {
    match name {
        "none" => Ok(ShiftMode::None),
        "paper" => Ok(ShiftMode::LimitShift),
        other => Err(CliError::usage(format!("unknown shift '{other}' (none or paper)"))),
    }
}

pub fn parse_schedule(name: &str) -> CliResult<Schedule> {
    Schedule::from_name(name)
        .ok_or_else(|| CliError::usage(format!("unknown schedule '{name}' (linear, quadratic or smoothstep)")))
}

/// Sweep spec from a preset or from explicit values, plus the default
/// output stem.
pub fn build_spec(args: &SweepArgs, cfg: &ConfigFile) -> CliResult<(SweepSpec, String)> {
    let grid = cfg
        .value::<String>("grid", args.grid.clone())?
        .map(|g| parse_grid(&g))
        .transpose()?;
    let levels = cfg.value("levels", args.k)?;
    let shift = cfg
        .value::<String>("shift", args.shift.clone())?
        .map(|s| parse_shift(&s))
        .transpose()?;

    if let Some(name) = cfg.value::<String>("preset", args.preset.clone())? {
        let given = [
            args.axis.is_some(),
            args.omega.is_some(),
            args.g0.is_some(),
            args.c.is_some(),
            args.schedule.is_some(),
        ];
        if given.iter().any(|&g| g) || PRESET_FIXED.iter().any(|k| cfg.contains(k)) {
            return Err(CliError::usage("a preset fixes axis, omega, g0, C and schedule"));
        }
        let base = sweeps::preset(&name)?;
        let trunc = crate::truncation(cfg, &args.trunc, base.trunc())?;
        let spec = SweepSpec::new(
            *base.base(),
            grid.unwrap_or_else(|| base.grid().to_vec()),
            levels.unwrap_or(base.levels()),
            shift.unwrap_or(base.shift_mode()),
            trunc,
        )?;
        return Ok((spec, name));
    }

    let axis: String = cfg.required("axis", args.axis.clone())?;
    let omega: f64 = cfg.required("omega", args.omega)?;
    let c = cfg.value_or("C", args.c, 0.0)?;
    let g0 = cfg.value("g0", args.g0)?;
    let schedule = cfg.value::<String>("schedule", args.schedule.clone())?;
    let base = match axis.as_str() {
        "g" => {
            if g0.is_some() || schedule.is_some() {
                return Err(CliError::usage("g0 and schedule apply to r sweeps only"));
            }
            ModelParams::resonant(omega, 0.0, c)?;
            SweepBase::Coupling { omega, c }
        }
        "r" => {
            let schedule = parse_schedule(schedule.as_deref().unwrap_or("linear"))?;
            SweepBase::RScheme(RScheme::new(omega, g0.unwrap_or(omega), c, schedule)?)
        }
        other => return Err(CliError::usage(format!("unknown axis '{other}' (g or r)"))),
    };
    let grid = grid.ok_or_else(|| CliError::usage("missing required value '--grid'"))?;
    let trunc = crate::truncation(cfg, &args.trunc, &crate::default_truncation(16))?;
    let spec = SweepSpec::new(base, grid, levels.unwrap_or(8), shift.unwrap_or(ShiftMode::None), trunc)?;
    Ok((spec, "sweep".to_string()))
}

/// Evaluates every grid point on a pool of `jobs` workers. Points are
/// independent and assembled by grid index, so the result does not depend on
/// `jobs`.
pub fn run_parallel(spec: &SweepSpec, jobs: usize) -> CliResult<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let points = pool.install(|| {
        (0..spec.grid().len())
            .into_par_iter()
            .map(|i| sweeps::evaluate_point(spec, i))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(sweeps::assemble(spec, points)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct PointSummary {
    pub index: usize,
    pub axis_value: f64,
    pub params: ModelParams,
    pub shift: f64,
    pub n_max_used: usize,
    pub converged: bool,
    pub max_level_shift_on_last_doubling: f64,
    pub classification: Option<SusyClass>,
}

/// Companion document for a CSV table.
#[derive(Debug, Clone, Serialize)]
pub struct SweepMetadataDocument {
    pub schema: String,
    pub code_version: String,
    pub axis: Axis,
    pub columns: Vec<String>,
    pub significant_digits: usize,
    pub spec: SweepSpec,
    pub limit: LimitHamiltonian,
    pub asymptotes: Vec<Asymptote>,
    pub notes: Vec<String>,
    pub unconverged_points: usize,
    pub points: Vec<PointSummary>,
}

impl SweepMetadataDocument {
    pub fn new(result: &SweepResult) -> Self {
        let meta = &result.metadata;
        Self {
            schema: meta.schema.clone(),
            code_version: meta.code_version.clone(),
            axis: meta.axis,
            columns: format::CSV_HEADER.iter().map(|c| c.to_string()).collect(),
            significant_digits: format::SIGNIFICANT_DIGITS,
            spec: meta.spec.clone(),
            limit: meta.limit,
            asymptotes: result.asymptotes.clone(),
            notes: meta.notes.clone(),
            unconverged_points: result.unconverged_points(),
            points: result
                .points
                .iter()
                .map(|p| PointSummary {
                    index: p.index,
                    axis_value: p.axis_value,
                    params: p.params,
                    shift: p.shift,
                    n_max_used: p.spectrum.n_max_used,
                    converged: p.spectrum.converged,
                    max_level_shift_on_last_doubling: p.spectrum.max_level_shift_on_last_doubling,
                    classification: p.susy.as_ref().map(|s| s.classification),
                })
                .collect(),
        }
    }
}

pub fn execute(args: &SweepArgs) -> CliResult<i32> {
    let cfg = ConfigFile::load_optional(args.config.as_deref())?;
    let mut keys = KEYS.to_vec();
    keys.extend(crate::TRUNC_KEYS);
    cfg.check_keys(&keys)?;

    let (spec, stem) = build_spec(args, &cfg)?;
    let default_jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let jobs = crate::positive_count("jobs", cfg.value_or("jobs", args.jobs, default_jobs)?)?;
    let fmt = cfg.value_or("format", args.format.clone(), "csv".to_string())?;
    let output: Option<PathBuf> = cfg.value("output", args.output.clone())?;

    let paths = match fmt.as_str() {
        "csv" => {
            let csv = output.unwrap_or_else(|| PathBuf::from(format!("{stem}.csv")));
            let meta = format::metadata_path(&csv)?;
            (csv, Some(meta))
        }
        "json" => (output.unwrap_or_else(|| PathBuf::from(format!("{stem}.json"))), None),
        other => return Err(CliError::usage(format!("unknown format '{other}' (csv or json)"))),
    };

    let result = run_parallel(&spec, jobs)?;
    match paths {
        (csv, Some(meta)) => {
            let file = File::create(&csv).map_err(|e| CliError::io(&csv, e))?;
            format::write_sweep_csv(&result, BufWriter::new(file))?;
            format::emit(Some(&meta), &format::to_json(&SweepMetadataDocument::new(&result))?)?;
            eprintln!("wrote {} and {}", csv.display(), meta.display());
        }
        (json, _) => {
            format::emit(Some(&json), &format::to_json(&result)?)?;
            eprintln!("wrote {}", json.display());
        }
    }
    let unconverged = result.unconverged_points();
    if unconverged > 0 {
        eprintln!("{unconverged} of {} points did not converge", result.points.len());
    }
    Ok(if unconverged == result.points.len() {
        EXIT_UNCONVERGED
    } else {
        EXIT_OK
    })
}
