//! Level-versus-parameter sweeps along the coupling `g` and along the
//! r-scheme parameter `r`.
//!
//! Every grid point is converged on its own cutoff, so points are
//! independent work items. [`evaluate_point`] and [`assemble`] are the pieces
//! a parallel driver needs; [`run`] is the serial driver.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fockspace::Truncation;
use crate::model::{self, LimitHamiltonian, ModelParams, RScheme, Schedule};
use crate::spectra::{self, Parity, Spectrum, SusyCriteria, SusyReport};

/// Schema tag for sweep tables and their metadata.
pub const SCHEMA: &str = "rabi-a2-sweep/1";

/// Frequency shared by the presets, as published to four decimals.
#[allow(clippy::approx_constant)]
pub const FIGURE_OMEGA: f64 = 6.2832;
/// Quadratic coefficient of the `C > 0` presets.
pub const FIGURE_C: f64 = 0.3770;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Axis {
    G,
    R,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::G => "g",
            Axis::R => "r",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ShiftMode {
    None,
    /// Add `g~² / w(g)` so the large-coupling and `r -> 1` limits are finite.
    #[default]
    LimitShift,
}

/// Fixed parameters of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "axis", rename_all = "snake_case"))]
pub enum SweepBase {
    /// Resonant model `omega_a = omega_c = omega`, coupling on the axis.
    #[cfg_attr(feature = "serde", serde(rename = "g"))]
    Coupling { omega: f64, c: f64 },
    #[cfg_attr(feature = "serde", serde(rename = "r"))]
    RScheme(RScheme),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepSpec {
    base: SweepBase,
    grid: Vec<f64>,
    levels: usize,
    shift_mode: ShiftMode,
    trunc: Truncation,
}

impl SweepSpec {
    pub fn new(
        base: SweepBase,
        grid: Vec<f64>,
        levels: usize,
        shift_mode: ShiftMode,
        trunc: Truncation,
    ) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::InvalidSweep("grid is empty"));
        }
        if grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSweep("grid values must be finite"));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSweep("grid must be strictly increasing"));
        }
        if levels < 3 {
            return Err(Error::InvalidSweep("at least 3 levels are needed for classification"));
        }
        match base {
            SweepBase::Coupling { omega, c } => {
                if grid[0] < 0.0 {
                    return Err(Error::InvalidSweep("coupling grid must be non-negative"));
                }
                ModelParams::resonant(omega, 0.0, c)?;
            }
            SweepBase::RScheme(_) => {
                if grid[0] < 0.0 || grid[grid.len() - 1] > 1.0 {
                    return Err(Error::InvalidSweep("r grid must lie in [0, 1]"));
                }
            }
        }
        Ok(Self {
            base,
            grid,
            levels,
            shift_mode,
            trunc,
        })
    }

    pub fn axis(&self) -> Axis {
        match self.base {
            SweepBase::Coupling { .. } => Axis::G,
            SweepBase::RScheme(_) => Axis::R,
        }
    }

    pub fn base(&self) -> &SweepBase {
        &self.base
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn shift_mode(&self) -> ShiftMode {
        self.shift_mode
    }

    pub fn trunc(&self) -> &Truncation {
        &self.trunc
    }

    /// Model parameters and applied scalar shift at an axis value.
    pub fn point(&self, axis_value: f64) -> Result<(ModelParams, f64)> {
        let params = match self.base {
            SweepBase::Coupling { omega, c } => ModelParams::resonant(omega, axis_value, c)?,
            SweepBase::RScheme(s) => s.params_at(axis_value)?,
        };
        let shift = match self.shift_mode {
            ShiftMode::None => 0.0,
            ShiftMode::LimitShift => model::limit_shift(&params),
        };
        Ok((params, shift))
    }

    /// Limit Hamiltonian the sweep approaches at the top of its grid.
    pub fn limit(&self) -> Result<LimitHamiltonian> {
        match self.base {
            SweepBase::Coupling { omega, c } => {
                LimitHamiltonian::strong_coupling(omega, self.grid[self.grid.len() - 1], c)
            }
            SweepBase::RScheme(s) => Ok(LimitHamiltonian::r_scheme_endpoint(&s)),
        }
    }
}

/// `n` evenly spaced values from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![start],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    end
                } else {
                    start + (end - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// `start, start + step, ...` up to `end` (inclusive within 1e-9 of a step).
pub fn stepped(start: f64, step: f64, end: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !end.is_finite() || end < start {
        return Err(Error::InvalidSweep("grid needs start <= end and a positive step"));
    }
    let count = libm::floor((end - start) / step + 1e-9) as usize + 1;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

/// Canned sweeps for the four spectral figures.
pub const PRESET_NAMES: [&str; 4] = ["fig1a", "fig1b", "fig2a", "fig2b"];

pub fn preset(name: &str) -> Result<SweepSpec> {
    let trunc = Truncation::new(16, Truncation::DEFAULT_REL_TOL, Truncation::DEFAULT_MAX_DOUBLINGS)?;
    let g_grid = linspace(0.0, 4.0 * FIGURE_OMEGA, 81);
    let r_grid = linspace(0.0, 1.0, 51);
    let levels = 8;
    let base = match name {
        "fig1a" => SweepBase::Coupling {
            omega: FIGURE_OMEGA,
            c: 0.0,
        },
        "fig1b" => SweepBase::Coupling {
            omega: FIGURE_OMEGA,
            c: FIGURE_C,
        },
        "fig2a" => SweepBase::RScheme(RScheme::new(FIGURE_OMEGA, FIGURE_OMEGA, 0.0, Schedule::Linear)?),
        "fig2b" => SweepBase::RScheme(RScheme::new(FIGURE_OMEGA, FIGURE_OMEGA, FIGURE_C, Schedule::Linear)?),
        other => return Err(Error::UnknownPreset(String::from(other))),
    };
    let grid = match base {
        SweepBase::Coupling { .. } => g_grid,
        SweepBase::RScheme(_) => r_grid,
    };
    SweepSpec::new(base, grid, levels, ShiftMode::LimitShift, trunc)
}

/// Converged spectrum and SUSY status at one grid point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointResult {
    pub index: usize,
    pub axis_value: f64,
    pub params: ModelParams,
    pub shift: f64,
    pub spectrum: Spectrum,
    /// `None` when the point did not converge or its ground state fits no
    /// class.
    pub susy: Option<SusyReport>,
}

/// Spectrum at grid point `index`, shifted per the sweep's shift mode.
pub fn evaluate_point(spec: &SweepSpec, index: usize) -> Result<PointResult> {
    let axis_value = *spec
        .grid
        .get(index)
        .ok_or(Error::InvalidSweep("grid index out of range"))?;
    let (params, shift) = spec.point(axis_value)?;
    let start = spectra::initial_cutoff(&params, &spec.trunc);
    let spectrum = spectra::converge(
        |t| Ok(model::build_hamiltonian(&params, t).shifted(shift)),
        &start,
        spec.levels,
    )?;
    let susy = if spectrum.converged {
        spectra::classify_susy(&spectrum, &SusyCriteria::for_params(&params)).ok()
    } else {
        None
    };
    Ok(PointResult {
        index,
        axis_value,
        params,
        shift,
        spectrum,
        susy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepRow {
    pub axis_value: f64,
    pub level_index: usize,
    pub energy: f64,
    pub parity: Parity,
    pub n_max_used: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Asymptote {
    pub level_index: usize,
    pub limit_energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepMetadata {
    pub schema: String,
    pub code_version: String,
    pub axis: Axis,
    pub spec: SweepSpec,
    pub limit: LimitHamiltonian,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepResult {
    /// `levels` rows per grid point, grid order then ascending energy.
    pub rows: Vec<SweepRow>,
    pub asymptotes: Vec<Asymptote>,
    pub points: Vec<PointResult>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn unconverged_points(&self) -> usize {
        self.points.iter().filter(|p| !p.spectrum.converged).count()
    }
}

/// Limit spectrum, diagonalized from the limit Hamiltonian and expressed on
/// the same energy origin as the sweep rows.
pub fn asymptotes(spec: &SweepSpec) -> Result<Vec<Asymptote>> {
    let limit = spec.limit()?;
    let trunc = Truncation::with_n_max(spec.levels + 1)?;
    let eigs = spectra::diagonalize(&limit.build(&trunc)?, spec.levels)?;
    // the limit spectra belong to the shifted model
    let offset = match (spec.shift_mode, spec.base) {
        (ShiftMode::LimitShift, _) => 0.0,
        (ShiftMode::None, SweepBase::Coupling { omega, c }) => {
            let top = spec.grid[spec.grid.len() - 1];
            model::limit_shift(&ModelParams::resonant(omega, top, c)?)
        }
        (ShiftMode::None, SweepBase::RScheme(s)) => s.shift(1.0),
    };
    Ok(eigs
        .values
        .into_iter()
        .enumerate()
        .map(|(level_index, e)| Asymptote {
            level_index,
            limit_energy: e - offset,
        })
        .collect())
}

/// Builds the table from per-point results, which may arrive in any order.
pub fn assemble(spec: &SweepSpec, mut points: Vec<PointResult>) -> Result<SweepResult> {
    points.sort_by_key(|p| p.index);
    if points.len() != spec.grid.len() || points.iter().enumerate().any(|(i, p)| p.index != i) {
        return Err(Error::InvalidSweep("point results do not cover the grid exactly once"));
    }
    let mut rows = Vec::with_capacity(points.len() * spec.levels);
    for p in &points {
        for (level_index, level) in p.spectrum.levels.iter().enumerate() {
            rows.push(SweepRow {
                axis_value: p.axis_value,
                level_index,
                energy: level.energy,
                parity: level.parity,
                n_max_used: p.spectrum.n_max_used,
                converged: p.spectrum.converged,
            });
        }
    }
    let mut notes = alloc::vec![String::from(
        "grid range and density are chosen for visual fidelity; they are not read from any published axis",
    )];
    if let SweepBase::RScheme(s) = spec.base {
        notes.push(format!(
            "atom frequency schedule `{}`; only its endpoints are fixed by the model",
            s.schedule().name()
        ));
    }
    if spec.shift_mode == ShiftMode::None {
        notes.push(String::from(
            "asymptotes are offset by the scalar shift at the top of the grid",
        ));
    }
    Ok(SweepResult {
        rows,
        asymptotes: asymptotes(spec)?,
        metadata: SweepMetadata {
            schema: String::from(SCHEMA),
            code_version: String::from(env!("CARGO_PKG_VERSION")),
            axis: spec.axis(),
            spec: spec.clone(),
            limit: spec.limit()?,
            notes,
        },
        points,
    })
}

/// Serial sweep over the whole grid.
pub fn run(spec: &SweepSpec) -> Result<SweepResult> {
    let points = (0..spec.grid.len())
        .map(|i| evaluate_point(spec, i))
        .collect::<Result<Vec<_>>>()?;
    assemble(spec, points)
}
