//! Numerical checks of the unitary equivalences and limits of the model.
//!
//! * spectrum equality between the full model and its squeezed image;
//! * the squeeze conjugation itself, projected on low Fock levels;
//! * the polaron-frame operator identity, projected on low Fock levels;
//! * distance of the shifted spectrum to each limit spectrum along a path.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fockspace::{self, Truncation, UnitaryOperator};
use crate::linalg::{self, CMatrix};
use crate::model::{self, LimitHamiltonian, ModelParams, RScheme};
use crate::spectra::{self, Parity, Spectrum};

/// Lowest-`k` comparison of the full model with its quadratic-free image.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EquivalenceReport {
    pub params: ModelParams,
    pub image: ModelParams,
    pub full_levels: Vec<f64>,
    pub image_levels: Vec<f64>,
    pub max_relative_discrepancy: f64,
    pub n_max_full: usize,
    pub n_max_image: usize,
    pub converged: bool,
}

impl EquivalenceReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.converged && self.max_relative_discrepancy < tol
    }
}

fn converge_params(p: &ModelParams, trunc: &Truncation, k: usize) -> Result<Spectrum> {
    let start = spectra::initial_cutoff(p, trunc);
    spectra::converge(|t| Ok(model::build_hamiltonian(p, t)), &start, k)
}

/// Converges both sides independently and compares eigenvalues only, so the
/// check does not depend on how the squeeze is realized.
pub fn hb_spectrum_equivalence(p: &ModelParams, k: usize, trunc: &Truncation) -> Result<EquivalenceReport> {
    let image = p.hb_image_params();
    let full = converge_params(p, trunc, k)?;
    let mapped = converge_params(&image, trunc, k)?;
    let full_levels = full.energies();
    let image_levels = mapped.energies();
    Ok(EquivalenceReport {
        params: *p,
        image,
        max_relative_discrepancy: spectra::relative_change(&full_levels, &image_levels),
        full_levels,
        image_levels,
        n_max_full: full.n_max_used,
        n_max_image: mapped.n_max_used,
        converged: full.converged && mapped.converged,
    })
}

/// Projected operator residual `||P (lhs - rhs) P||_F`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResidualReport {
    pub residual: f64,
    pub n_max: usize,
    pub k_subspace: usize,
    pub unitarity_defect: f64,
    pub edge_weight: f64,
    /// Set when the conjugating unitary sends part of the compared subspace
    /// onto the top Fock level.
    pub truncation_inadequate: bool,
}

/// Edge weight above which a conjugating unitary is flagged.
pub const EDGE_WEIGHT_TOL: f64 = 1e-12;

fn inadequate(u: &UnitaryOperator, k_subspace: usize) -> bool {
    u.unitarity_defect() > EDGE_WEIGHT_TOL || u.edge_weight_below(k_subspace) > EDGE_WEIGHT_TOL
}

/// Frobenius norm of `m` restricted to Fock levels `< k` in both spin blocks.
fn projected_norm(m: &CMatrix, trunc: &Truncation, k: usize) -> f64 {
    let d = trunc.boson_dim();
    let idx: Vec<usize> = (0..2).flat_map(|s| (0..k.min(d)).map(move |n| s * d + n)).collect();
    let block = m.select_rows(idx.iter()).select_columns(idx.iter());
    linalg::frobenius(&block)
}

/// Polaron-frame identity at `C = 0`:
/// `U(b)† [H(wa, wc, g, 0) + g²/wc] U(b)` against
/// `wc (a†a + 1/2) - (wa/2)[s+ D(b)² + s- D(-b)²]`, `b = g / wc`.
///
/// The two sides come from different builders; only the projection onto the
/// lowest `k_subspace` Fock levels is compared since the cutoff corrupts the
/// top of the basis.
pub fn polaron_identity_residual(p: &ModelParams, k_subspace: usize, trunc: &Truncation) -> Result<ResidualReport> {
    if p.c() != 0.0 {
        return Err(Error::QuadraticTermPresent(p.c()));
    }
    let beta = p.g() / p.omega_c();
    let u = model::build_polaron_unitary(beta, trunc);
    let h = model::shifted_hamiltonian(p, trunc);
    let lhs = u.matrix().adjoint() * h.matrix() * u.matrix();
    let rhs = model::build_polaron_frame_hamiltonian(p, trunc)?;
    let residual = projected_norm(&(lhs - rhs.matrix()), trunc, k_subspace);
    Ok(ResidualReport {
        residual,
        n_max: trunc.n_max(),
        k_subspace,
        unitarity_defect: u.unitarity_defect(),
        edge_weight: u.edge_weight_below(k_subspace),
        truncation_inadequate: inadequate(&u, k_subspace),
    })
}

/// [`polaron_identity_residual`] at each cutoff in turn.
pub fn polaron_residual_sequence(p: &ModelParams, k_subspace: usize, cutoffs: &[usize]) -> Result<Vec<ResidualReport>> {
    cutoffs
        .iter()
        .map(|&n| polaron_identity_residual(p, k_subspace, &Truncation::with_n_max(n)?))
        .collect()
}

/// True when each residual is no larger than its predecessor, allowing
/// rounding noise of size `noise`.
pub fn decreasing_within_noise(reports: &[ResidualReport], noise: f64) -> bool {
    reports.windows(2).all(|w| w[1].residual <= w[0].residual.max(noise))
}

/// Direct check of the squeeze realization: `S(zeta)† H(p) S(zeta)` against
/// `H(wa, w(g), g~, 0)`, projected onto the lowest `k_subspace` Fock levels.
pub fn squeeze_conjugation_residual(p: &ModelParams, k_subspace: usize, trunc: &Truncation) -> Result<ResidualReport> {
    let image = model::hb_map(p);
    let s = fockspace::squeeze(image.zeta, trunc);
    let full_s = fockspace::tensor(&fockspace::spin_identity(), s.matrix())?;
    let h = model::build_hamiltonian(p, trunc);
    let lhs = full_s.adjoint() * h.matrix() * &full_s;
    let rhs = model::build_hamiltonian(&p.hb_image_params(), trunc);
    let residual = projected_norm(&(lhs - rhs.matrix()), trunc, k_subspace);
    Ok(ResidualReport {
        residual,
        n_max: trunc.n_max(),
        k_subspace,
        unitarity_defect: s.unitarity_defect(),
        edge_weight: s.edge_weight_below(k_subspace),
        truncation_inadequate: inadequate(&s, k_subspace),
    })
}

/// Which limit a monitor tracks.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum LimitTarget {
    /// Resonant model without quadratic term, `g -> inf`.
    StrongCouplingFree { omega: f64 },
    /// Resonant model with quadratic term, `g -> inf`; the target ladder uses
    /// `w(g)` at each point.
    StrongCouplingQuadratic { omega: f64, c: f64 },
    /// r-scheme, `r -> 1`.
    RSchemeEndpoint { scheme: RScheme },
}

impl LimitTarget {
    fn params(&self, axis_value: f64) -> Result<ModelParams> {
        match *self {
            Self::StrongCouplingFree { omega } => ModelParams::resonant(omega, axis_value, 0.0),
            Self::StrongCouplingQuadratic { omega, c } => ModelParams::resonant(omega, axis_value, c),
            Self::RSchemeEndpoint { scheme } => scheme.params_at(axis_value),
        }
    }

    fn limit(&self, axis_value: f64) -> Result<LimitHamiltonian> {
        match *self {
            Self::StrongCouplingFree { omega } => Ok(LimitHamiltonian::StrongCouplingFree { omega }),
            Self::StrongCouplingQuadratic { omega, c } => {
                let p = ModelParams::resonant(omega, axis_value, c)?;
                Ok(LimitHamiltonian::StrongCouplingQuadratic {
                    omega,
                    omega_g: model::hb_map(&p).omega_g,
                })
            }
            Self::RSchemeEndpoint { scheme } => Ok(LimitHamiltonian::r_scheme_endpoint(&scheme)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MonitorPoint {
    pub axis_value: f64,
    pub levels: Vec<f64>,
    pub parities: Vec<Parity>,
    pub limit_levels: Vec<f64>,
    /// `|E_i - L_i|` per level.
    pub distances: Vec<f64>,
    pub max_distance: f64,
    pub ground_pair_splitting: f64,
    /// Distance from the ground to the lowest opposite-parity level.
    pub parity_partner_gap: Option<f64>,
    pub n_max_used: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MonitorReport {
    pub target: LimitTarget,
    pub points: Vec<MonitorPoint>,
    pub eventually_decreasing: bool,
}

/// True when the last third of `seq` (at least two entries) never increases.
pub fn eventually_decreasing(seq: &[f64]) -> bool {
    if seq.len() < 2 {
        return true;
    }
    let tail = seq.len().div_ceil(3).max(2);
    seq[seq.len() - tail..].windows(2).all(|w| w[1] <= w[0])
}

/// Distance of the shifted model's lowest `k` levels to the limit spectrum at
/// each axis value.
pub fn limit_convergence_monitor(
    target: &LimitTarget,
    axis_values: &[f64],
    k: usize,
    trunc: &Truncation,
) -> Result<MonitorReport> {
    if axis_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSweep("monitor axis must be strictly increasing"));
    }
    let mut points = Vec::with_capacity(axis_values.len());
    for &axis_value in axis_values {
        let p = target.params(axis_value)?;
        let shift = model::limit_shift(&p);
        let start = spectra::initial_cutoff(&p, trunc);
        let spec = spectra::converge(|t| Ok(model::build_hamiltonian(&p, t).shifted(shift)), &start, k)?;
        let levels = spec.energies();
        let limit_levels = target.limit(axis_value)?.levels(levels.len())?;
        let distances: Vec<f64> = levels.iter().zip(&limit_levels).map(|(e, l)| (e - l).abs()).collect();
        let ground = spec.levels[0];
        let parity_partner_gap = spec
            .levels
            .iter()
            .find(|l| l.parity != ground.parity)
            .map(|l| l.energy - ground.energy);
        points.push(MonitorPoint {
            axis_value,
            max_distance: distances.iter().copied().fold(0.0, f64::max),
            ground_pair_splitting: levels.get(1).map_or(f64::NAN, |e1| e1 - levels[0]),
            parities: spec.levels.iter().map(|l| l.parity).collect(),
            levels,
            limit_levels,
            distances,
            parity_partner_gap,
            n_max_used: spec.n_max_used,
            converged: spec.converged,
        });
    }
    let max_distances: Vec<f64> = points.iter().map(|p| p.max_distance).collect();
    Ok(MonitorReport {
        target: *target,
        eventually_decreasing: eventually_decreasing(&max_distances),
        points,
    })
}

/// Largest entry of `[H, P]` for the full model.
pub fn parity_commutator(p: &ModelParams, trunc: &Truncation) -> f64 {
    let h = model::build_hamiltonian(p, trunc);
    h.commutator_max(&fockspace::parity(trunc))
        .expect("same dimension by construction")
}

/// Lowest `k` levels from the full-space route (diagonalize everything, then
/// label by parity expectation) and from the per-sector route.
pub fn sector_agreement(p: &ModelParams, trunc: &Truncation, k: usize) -> Result<f64> {
    let h = model::build_hamiltonian(p, trunc);
    let full = spectra::label_parities(&spectra::diagonalize(&h, k)?, &fockspace::parity(trunc))?;
    let sectors = spectra::sector_levels(&h, trunc, k)?;
    Ok(full
        .levels
        .iter()
        .zip(&sectors)
        .map(|(a, b)| (a.energy - b.energy).abs())
        .fold(0.0, f64::max))
}
