//! Verification suites over the core oracles. Each oracle yields named
//! checks against fixed tolerances; the process exits 4 when any check fails.

use rabi_a2_core::sweeps::{FIGURE_C, FIGURE_OMEGA};
use rabi_a2_core::verify::{self, decreasing_within_noise, eventually_decreasing, LimitTarget, MonitorReport};
use rabi_a2_core::{ModelParams, RScheme, Schedule, Truncation};
use serde::Serialize;

use crate::args::VerifyArgs;
use crate::config::ConfigFile;
use crate::error::{CliError, CliResult, EXIT_BREACH, EXIT_OK};
use crate::format;
use crate::sweep::parse_schedule;

pub const SCHEMA: &str = "rabi-a2-verify/1";

pub const EQUIVALENCE_TOL: f64 = 1e-6;
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Rounding floor for the residual sequence, per unit of the largest
/// frequency.
pub const RESIDUAL_NOISE: f64 = 1e-11;
/// Ground-pair distance to `omega/2`, per unit `omega`.
pub const FREE_LIMIT_TOL: f64 = 1e-3;
/// Ground-pair splitting, per unit `omega`.
pub const SPLITTING_TOL: f64 = 1e-4;
/// Band around `omega` for the parity-partner gap.
pub const PARTNER_BAND: f64 = 0.15;
pub const ENDPOINT_REL_TOL: f64 = 1e-3;

const KEYS: [&str; 11] = [
    "suite",
    "kind",
    "omega-a",
    "omega-c",
    "g",
    "C",
    "levels",
    "k-subspace",
    "axis-values",
    "schedule",
    "output",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oracle {
    SqueezedImage,
    PolaronIdentity,
    StrongCouplingFree,
    StrongCouplingQuadratic,
    RSchemeEndpoint,
}

impl Oracle {
    pub fn name(self) -> &'static str {
        match self {
            Self::SqueezedImage => "eq2",
            Self::PolaronIdentity => "eq3",
            Self::StrongCouplingFree => "eq4",
            Self::StrongCouplingQuadratic => "eq5",
            Self::RSchemeEndpoint => "eq6",
        }
    }

    /// Oracles selected by a suite name and an optional limit kind.
    pub fn select(suite: &str, kind: Option<&str>) -> CliResult<Vec<Self>> {
        let limits = match kind {
            None => vec![
                Self::StrongCouplingFree,
                Self::StrongCouplingQuadratic,
                Self::RSchemeEndpoint,
            ],
            Some("eq4") => vec![Self::StrongCouplingFree],
            Some("eq5") => vec![Self::StrongCouplingQuadratic],
            Some("eq6") => vec![Self::RSchemeEndpoint],
            Some(other) => return Err(CliError::usage(format!("unknown kind '{other}' (eq4, eq5 or eq6)"))),
        };
        match suite {
            "eq2" | "eq3" if kind.is_some() => Err(CliError::usage("--kind applies to the limits and all suites")),
            "eq2" => Ok(vec![Self::SqueezedImage]),
            "eq3" => Ok(vec![Self::PolaronIdentity]),
            "limits" => Ok(limits),
            "all" => Ok([vec![Self::SqueezedImage, Self::PolaronIdentity], limits].concat()),
            other => Err(CliError::usage(format!(
                "unknown suite '{other}' (eq2, eq3, limits or all)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub bound: Option<f64>,
}

impl Check {
    /// Passes when `value <= bound`.
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: value <= bound,
            value: Some(value),
            bound: Some(bound),
        }
    }

    pub fn holds(name: &str, passed: bool) -> Self {
        Self {
            name: name.to_string(),
            passed,
            value: None,
            bound: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub oracle: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub report: serde_json::Value,
}

impl OracleReport {
    fn new<T: Serialize>(oracle: Oracle, checks: Vec<Check>, report: &T) -> CliResult<Self> {
        Ok(Self {
            oracle: oracle.name().to_string(),
            passed: checks.iter().all(|c| c.passed),
            checks,
            report: serde_json::to_value(report)?,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyDocument {
    pub schema: String,
    pub code_version: String,
    pub suite: String,
    pub passed: bool,
    pub oracles: Vec<OracleReport>,
}

/// Values the user supplied; each oracle fills the rest with its defaults.
#[derive(Debug, Clone, Default)]
pub struct Inputs {
    pub omega_a: Option<f64>,
    pub omega_c: Option<f64>,
    pub g: Option<f64>,
    pub c: Option<f64>,
    pub k: Option<usize>,
    pub k_subspace: Option<usize>,
    pub axis_values: Option<Vec<f64>>,
    pub schedule: Option<Schedule>,
    pub n_max: Option<usize>,
    pub rel_tol: Option<f64>,
    pub max_doublings: Option<u32>,
}

impl Inputs {
    fn trunc(&self, default_n_max: usize) -> CliResult<Truncation> {
        Ok(Truncation::new(
            self.n_max.unwrap_or(default_n_max),
            self.rel_tol.unwrap_or(Truncation::DEFAULT_REL_TOL),
            self.max_doublings.unwrap_or(Truncation::DEFAULT_MAX_DOUBLINGS),
        )?)
    }

    fn k(&self, default: usize) -> CliResult<usize> {
        crate::positive_count("levels", self.k.unwrap_or(default))
    }

    /// Resonant frequency of the limit monitors.
    fn resonant_omega(&self) -> CliResult<f64> {
        let omega = self.omega_a.unwrap_or(FIGURE_OMEGA);
        if self.omega_c.is_some_and(|wc| wc != omega) {
            return Err(CliError::usage(
                "limit monitors use omega_a = omega_c; give --omega-a only",
            ));
        }
        Ok(omega)
    }

    fn axis_or(&self, default: Vec<f64>) -> Vec<f64> {
        self.axis_values.clone().unwrap_or(default)
    }
}

pub fn run_oracle(oracle: Oracle, inputs: &Inputs) -> CliResult<OracleReport> {
    match oracle {
        Oracle::SqueezedImage => squeezed_image(inputs),
        Oracle::PolaronIdentity => polaron_identity(inputs),
        Oracle::StrongCouplingFree | Oracle::StrongCouplingQuadratic | Oracle::RSchemeEndpoint => limit(oracle, inputs),
    }
}

fn squeezed_image(inputs: &Inputs) -> CliResult<OracleReport> {
    let p = ModelParams::new(
        inputs.omega_a.unwrap_or(FIGURE_OMEGA),
        inputs.omega_c.unwrap_or(FIGURE_OMEGA),
        inputs.g.unwrap_or(FIGURE_OMEGA),
        inputs.c.unwrap_or(FIGURE_C),
    )?;
    let report = verify::hb_spectrum_equivalence(&p, inputs.k(6)?, &inputs.trunc(16)?)?;
    let checks = vec![
        Check::holds("converged", report.converged),
        Check::at_most(
            "max_relative_discrepancy",
            report.max_relative_discrepancy,
            EQUIVALENCE_TOL,
        ),
    ];
    OracleReport::new(Oracle::SqueezedImage, checks, &report)
}

fn polaron_identity(inputs: &Inputs) -> CliResult<OracleReport> {
    let p = ModelParams::new(
        inputs.omega_a.unwrap_or(1.0),
        inputs.omega_c.unwrap_or(1.0),
        inputs.g.unwrap_or(1.0),
        inputs.c.unwrap_or(0.0),
    )?;
    let k_subspace = crate::positive_count("k-subspace", inputs.k_subspace.unwrap_or(40))?;
    let n = inputs.trunc(200)?.n_max();
    let seq = verify::polaron_residual_sequence(&p, k_subspace, &[n, 2 * n])?;
    let noise = RESIDUAL_NOISE * p.omega_a().max(p.omega_c()).max(p.g()).max(1.0);
    let checks = vec![
        Check::at_most("residual", seq[0].residual, RESIDUAL_TOL),
        Check::at_most("edge_weight", seq[0].edge_weight, verify::EDGE_WEIGHT_TOL),
        Check::holds("residual_decreases_on_doubling", decreasing_within_noise(&seq, noise)),
    ];
    OracleReport::new(Oracle::PolaronIdentity, checks, &seq)
}

fn monitor_checks(report: &MonitorReport) -> Vec<Check> {
    vec![
        Check::holds("all_converged", report.points.iter().all(|p| p.converged)),
        Check::holds("distance_eventually_decreasing", report.eventually_decreasing),
    ]
}

fn limit(oracle: Oracle, inputs: &Inputs) -> CliResult<OracleReport> {
    let k = inputs.k(8)?;
    let trunc = inputs.trunc(16)?;
    match oracle {
        Oracle::StrongCouplingFree => {
            let omega = inputs.resonant_omega()?;
            if inputs.c.is_some_and(|c| c != 0.0) {
                return Err(CliError::usage("eq4 is the C = 0 limit"));
            }
            let axis = inputs.axis_or((1..=4).map(|m| m as f64 * omega).collect());
            let report =
                verify::limit_convergence_monitor(&LimitTarget::StrongCouplingFree { omega }, &axis, k, &trunc)?;
            let top = report.points.last().ok_or_else(|| CliError::usage("empty axis"))?;
            let ground: Vec<f64> = report.points.iter().map(|p| p.distances[0]).collect();
            let mut checks = monitor_checks(&report);
            checks.push(Check::holds(
                "ground_distance_eventually_decreasing",
                eventually_decreasing(&ground),
            ));
            checks.push(Check::at_most(
                "ground_distance_at_top",
                top.distances[0],
                FREE_LIMIT_TOL * omega,
            ));
            checks.push(Check::at_most(
                "ground_splitting_at_top",
                top.ground_pair_splitting,
                SPLITTING_TOL * omega,
            ));
            OracleReport::new(oracle, checks, &report)
        }
        Oracle::StrongCouplingQuadratic => {
            let omega = inputs.resonant_omega()?;
            let c = inputs.c.unwrap_or(FIGURE_C);
            if c <= 0.0 {
                return Err(CliError::usage("eq5 needs C > 0"));
            }
            let axis = inputs.axis_or((1..=4).map(|m| m as f64 * omega).collect());
            let target = LimitTarget::StrongCouplingQuadratic { omega, c };
            let report = verify::limit_convergence_monitor(&target, &axis, k, &trunc)?;
            let top = report.points.last().ok_or_else(|| CliError::usage("empty axis"))?;
            let gap = top.parity_partner_gap.unwrap_or(f64::INFINITY);
            let mut checks = monitor_checks(&report);
            checks.push(Check::at_most(
                "partner_gap_offset_at_top",
                (gap - omega).abs(),
                PARTNER_BAND * omega,
            ));
            OracleReport::new(oracle, checks, &report)
        }
        Oracle::RSchemeEndpoint => {
            let omega = inputs.omega_a.unwrap_or(FIGURE_OMEGA);
            let scheme = RScheme::new(
                omega,
                inputs.g.unwrap_or(omega),
                inputs.c.unwrap_or(FIGURE_C),
                inputs.schedule.unwrap_or(Schedule::Linear),
            )?;
            let axis = inputs.axis_or(vec![0.9, 0.99, 1.0]);
            let report = verify::limit_convergence_monitor(&LimitTarget::RSchemeEndpoint { scheme }, &axis, k, &trunc)?;
            let top = report.points.last().ok_or_else(|| CliError::usage("empty axis"))?;
            let relative = top
                .distances
                .iter()
                .zip(&top.limit_levels)
                .map(|(d, l)| d / l.abs().max(1e-3 * omega))
                .fold(0.0, f64::max);
            let mut checks = monitor_checks(&report);
            checks.push(Check::at_most("relative_distance_at_top", relative, ENDPOINT_REL_TOL));
            OracleReport::new(oracle, checks, &report)
        }
        Oracle::SqueezedImage | Oracle::PolaronIdentity => unreachable!("not a limit oracle"),
    }
}

pub fn run_suite(suite: &str, kind: Option<&str>, inputs: &Inputs) -> CliResult<VerifyDocument> {
    let oracles = Oracle::select(suite, kind)?
        .into_iter()
        .map(|o| run_oracle(o, inputs))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(VerifyDocument {
        schema: SCHEMA.to_string(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        suite: suite.to_string(),
        passed: oracles.iter().all(|o| o.passed),
        oracles,
    })
}

fn parse_list(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CliError::usage(format!("axis value '{}': {e}", s.trim())))
        })
        .collect()
}

pub fn execute(args: &VerifyArgs) -> CliResult<i32> {
    let cfg = ConfigFile::load_optional(args.config.as_deref())?;
    let mut keys = KEYS.to_vec();
    keys.extend(crate::TRUNC_KEYS);
    cfg.check_keys(&keys)?;

    let suite = cfg.value_or("suite", args.suite.clone(), "all".to_string())?;
    let kind = cfg.value::<String>("kind", args.kind.clone())?;
    let inputs = Inputs {
        omega_a: cfg.value("omega-a", args.omega_a)?,
        omega_c: cfg.value("omega-c", args.omega_c)?,
        g: cfg.value("g", args.g)?,
        c: cfg.value("C", args.c)?,
        k: cfg.value("levels", args.k)?,
        k_subspace: cfg.value("k-subspace", args.k_subspace)?,
        axis_values: cfg
            .value::<String>("axis-values", args.axis_values.clone())?
            .map(|s| parse_list(&s))
            .transpose()?,
        schedule: cfg
            .value::<String>("schedule", args.schedule.clone())?
            .map(|s| parse_schedule(&s))
            .transpose()?,
        n_max: cfg.value("n-max", args.trunc.n_max)?,
        rel_tol: cfg.value("rel-tol", args.trunc.rel_tol)?,
        max_doublings: cfg.value("max-doublings", args.trunc.max_doublings)?,
    };
    let output = cfg.value("output", args.output.clone())?;
    Oracle::select(&suite, kind.as_deref())?;

    let doc = run_suite(&suite, kind.as_deref(), &inputs)?;
    format::emit(output.as_deref(), &format::to_json(&doc)?)?;
    for o in &doc.oracles {
        let failed: Vec<&str> = o.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            eprintln!("{}: ok", o.oracle);
        } else {
            eprintln!("{}: breach ({})", o.oracle, failed.join(", "));
        }
    }
    Ok(if doc.passed { EXIT_OK } else { EXIT_BREACH })
}
