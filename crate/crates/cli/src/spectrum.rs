use rabi_a2_core::model::{self, limit_shift};
use rabi_a2_core::spectra::{self, classify_susy};
use rabi_a2_core::{Level, ModelParams, SusyClass, SusyCriteria};
use serde::Serialize;

use crate::args::SpectrumArgs;
use crate::config::ConfigFile;
use crate::error::{CliError, CliResult, EXIT_OK, EXIT_UNCONVERGED};
use crate::format;

const KEYS: [&str; 7] = ["omega-a", "omega-c", "g", "C", "levels", "shift", "output"];

#[derive(Debug, Clone, Serialize)]
pub struct SusySummary {
    pub classification: SusyClass,
    pub ground_energy: f64,
    pub splitting: f64,
    pub ground_degenerate: bool,
    pub gap_above_ground: f64,
    pub parity_partner_gap: Option<f64>,
    pub tolerance_used: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumDocument {
    pub params: ModelParams,
    pub shift_mode: String,
    pub shift: f64,
    pub levels: Vec<Level>,
    pub susy: Option<SusySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub susy_error: Option<String>,
    pub n_max_used: usize,
    pub converged: bool,
    pub max_level_shift_on_last_doubling: f64,
    pub code_version: String,
}

pub fn execute(args: &SpectrumArgs) -> CliResult<i32> {
    let cfg = ConfigFile::load_optional(args.config.as_deref())?;
    let mut keys = KEYS.to_vec();
    keys.extend(crate::TRUNC_KEYS);
    cfg.check_keys(&keys)?;

    let params = ModelParams::new(
        cfg.required("omega-a", args.omega_a)?,
        cfg.required("omega-c", args.omega_c)?,
        cfg.required("g", args.g)?,
        cfg.value_or("C", args.c, 0.0)?,
    )?;
    let k = crate::positive_count("levels", cfg.value_or("levels", args.k, 6)?)?;
    let shift_mode = cfg.value_or("shift", args.shift.clone(), "none".to_string())?;
    let shift = match shift_mode.as_str() {
        "none" => 0.0,
        "paper" => limit_shift(&params),
        other => return Err(CliError::usage(format!("unknown shift '{other}' (none or paper)"))),
    };
    let trunc = crate::truncation(&cfg, &args.trunc, &crate::default_truncation(16))?;
    let output = cfg.value("output", args.output.clone())?;

    let doc = compute(params, shift_mode, shift, k, &trunc)?;
    format::emit(output.as_deref(), &format::to_json(&doc)?)?;
    Ok(if doc.converged { EXIT_OK } else { EXIT_UNCONVERGED })
}

pub fn compute(
    params: ModelParams,
    shift_mode: String,
    shift: f64,
    k: usize,
    trunc: &rabi_a2_core::Truncation,
) -> CliResult<SpectrumDocument> {
    let start = spectra::initial_cutoff(&params, trunc);
    let spec = spectra::converge(|t| Ok(model::build_hamiltonian(&params, t).shifted(shift)), &start, k)?;
    let (susy, susy_error) = if spec.converged {
        match classify_susy(&spec, &SusyCriteria::for_params(&params)) {
            Ok(r) => (
                Some(SusySummary {
                    classification: r.classification,
                    ground_energy: r.ground_energy,
                    splitting: r.ground_pair_splitting,
                    ground_degenerate: r.ground_degenerate,
                    gap_above_ground: r.gap_above_ground,
                    parity_partner_gap: r.parity_partner_gap,
                    tolerance_used: r.tolerance_used,
                }),
                None,
            ),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, Some("spectrum did not converge".to_string()))
    };
    Ok(SpectrumDocument {
        params,
        shift_mode,
        shift,
        levels: spec.levels.clone(),
        susy,
        susy_error,
        n_max_used: spec.n_max_used,
        converged: spec.converged,
        max_level_shift_on_last_doubling: spec.max_level_shift_on_last_doubling,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
    })
}
