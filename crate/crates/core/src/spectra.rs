//! Eigendecomposition, parity labeling, adaptive truncation and SUSY status.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fockspace::{self, HermitianOperator, Truncation};
use crate::linalg::CMatrix;
use crate::model::{hb_map, ModelParams};

/// Eigenvalue of the parity operator `sigma_z (-1)^{a†a}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(into = "i8", try_from = "i8"))]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> i8 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn from_sign(sign: f64) -> Self {
        if sign >= 0.0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

impl From<Parity> for i8 {
    fn from(p: Parity) -> i8 {
        p.sign()
    }
}

impl TryFrom<i8> for Parity {
    type Error = &'static str;

    fn try_from(v: i8) -> core::result::Result<Self, Self::Error> {
        match v {
            1 => Ok(Parity::Even),
            -1 => Ok(Parity::Odd),
            _ => Err("parity must be +1 or -1"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Level {
    pub energy: f64,
    pub parity: Parity,
}

/// Lowest eigenpairs of a Hermitian matrix, eigenvalues ascending and
/// eigenvectors stored as matching columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Spectrum {
    pub levels: Vec<Level>,
    pub n_max_used: usize,
    pub converged: bool,
    /// Largest relative level change observed on the last cutoff doubling.
    pub max_level_shift_on_last_doubling: f64,
}

impl Spectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }
}

/// Lowest `k` eigenpairs (all of them if `k` exceeds the dimension).
///
/// Real matrices go through the real symmetric solver.
pub fn diagonalize(h: &HermitianOperator, k: usize) -> Result<EigenPairs> {
    let (values, vectors) = if h.is_real() {
        let m = h.matrix().map(|z| z.re);
        let eig = SymmetricEigen::new(m);
        let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        (values, eig.eigenvectors.map(|x| Complex64::new(x, 0.0)))
    } else {
        let eig = SymmetricEigen::new(h.matrix().clone());
        let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        (values, eig.eigenvectors)
    };
    if values.iter().any(|v| !v.is_finite()) || vectors.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFiniteEigenvalues);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order.truncate(k);
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = vectors.select_columns(order.iter());
    Ok(EigenPairs {
        values: sorted_values,
        vectors: sorted_vectors,
    })
}

/// Lowest `k` eigenvalues, ascending, without eigenvectors.
pub fn eigenvalues(h: &HermitianOperator, k: usize) -> Result<Vec<f64>> {
    let mut values: Vec<f64> = if h.is_real() {
        h.matrix()
            .map(|z| z.re)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    } else {
        h.matrix().symmetric_eigenvalues().iter().copied().collect()
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteEigenvalues);
    }
    values.sort_by(f64::total_cmp);
    values.truncate(k);
    Ok(values)
}

/// Tolerance on `|<v|P|v>|` below which a level counts as mixed parity.
pub const PARITY_PURITY_TOL: f64 = 1e-6;

/// Labels each eigenvector by the sign of `<v|P|v>`.
///
/// Near-degenerate groups are first rotated within their span so that each
/// vector diagonalizes `P` there.
pub fn label_parities(eigs: &EigenPairs, parity: &HermitianOperator) -> Result<Spectrum> {
    let n = eigs.values.len();
    if eigs.vectors.nrows() != parity.dim() {
        return Err(Error::DimensionMismatch {
            expected: parity.dim(),
            found: eigs.vectors.nrows(),
        });
    }
    let scale = eigs.values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let mut vectors = eigs.vectors.clone();

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigs.values[end] - eigs.values[end - 1] <= 1e-9 * scale {
            end += 1;
        }
        if end - start > 1 {
            let block = vectors.columns(start, end - start).into_owned();
            let projected = block.adjoint() * parity.matrix() * &block;
            let rot = SymmetricEigen::new(projected).eigenvectors;
            let rotated = &block * rot;
            vectors.columns_mut(start, end - start).copy_from(&rotated);
        }
        start = end;
    }

    let mut levels = Vec::with_capacity(n);
    for (index, &energy) in eigs.values.iter().enumerate() {
        let v = vectors.column(index);
        let expectation = (v.adjoint() * parity.matrix() * v)[(0, 0)].re;
        if expectation.abs() < 1.0 - PARITY_PURITY_TOL {
            return Err(Error::MixedParity { index, expectation });
        }
        levels.push(Level {
            energy,
            parity: Parity::from_sign(expectation),
        });
    }
    Ok(Spectrum {
        levels,
        n_max_used: parity.dim() / 2 - 1,
        converged: true,
        max_level_shift_on_last_doubling: 0.0,
    })
}

/// Principal submatrix on the basis states of one parity sector.
pub fn sector_block(h: &HermitianOperator, trunc: &Truncation, parity: Parity) -> Result<HermitianOperator> {
    if h.dim() != trunc.full_dim() {
        return Err(Error::DimensionMismatch {
            expected: trunc.full_dim(),
            found: h.dim(),
        });
    }
    let idx: Vec<usize> = (0..h.dim())
        .filter(|&i| fockspace::parity_sign(i, trunc) == parity.sign())
        .collect();
    let m: CMatrix = h.matrix().select_rows(idx.iter()).select_columns(idx.iter());
    HermitianOperator::new(m)
}

/// Lowest `k` levels obtained by diagonalizing each parity block separately
/// and merging. Labels are exact because the parity operator is diagonal in
/// the product basis.
pub fn sector_levels(h: &HermitianOperator, trunc: &Truncation, k: usize) -> Result<Vec<Level>> {
    let mut levels = Vec::with_capacity(2 * k);
    for parity in [Parity::Even, Parity::Odd] {
        let block = sector_block(h, trunc, parity)?;
        levels.extend(
            eigenvalues(&block, k)?
                .into_iter()
                .map(|energy| Level { energy, parity }),
        );
    }
    levels.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then(b.parity.sign().cmp(&a.parity.sign()))
    });
    levels.truncate(k);
    Ok(levels)
}

/// Largest per-level relative change between two ascending level lists.
///
/// Each difference is scaled by the larger of the two energies, floored at
/// 1e-3 of the largest energy in the list so a level sitting near zero is
/// compared on the spectrum's own scale.
pub fn relative_change(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0f64, |acc, v| acc.max(v.abs()));
    let floor = (1e-3 * scale).max(f64::MIN_POSITIVE);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(floor))
        .fold(0.0, f64::max)
}

/// Diagonalizes at the starting cutoff and keeps doubling until the lowest
/// `k` levels change by less than `rel_tol` or `max_doublings` is spent.
///
/// The reported levels are those at the smaller cutoff of the last pair
/// compared, so `n_max_used` is the cutoff whose doubling was verified. When
/// no doubling is allowed or the cap is hit, the flag stays false.
pub fn converge<F>(builder: F, trunc: &Truncation, k: usize) -> Result<Spectrum>
where
    F: Fn(&Truncation) -> Result<HermitianOperator>,
{
    let mut current = *trunc;
    let mut levels = sector_levels(&builder(&current)?, &current, k)?;
    let mut last_shift = f64::INFINITY;
    for _ in 0..trunc.max_doublings() {
        let next = current.doubled();
        let next_levels = sector_levels(&builder(&next)?, &next, k)?;
        let a: Vec<f64> = levels.iter().map(|l| l.energy).collect();
        let b: Vec<f64> = next_levels.iter().map(|l| l.energy).collect();
        last_shift = relative_change(&a, &b);
        if last_shift < trunc.rel_tol() {
            return Ok(Spectrum {
                levels,
                n_max_used: current.n_max(),
                converged: true,
                max_level_shift_on_last_doubling: last_shift,
            });
        }
        current = next;
        levels = next_levels;
    }
    Ok(Spectrum {
        levels,
        n_max_used: current.n_max(),
        converged: false,
        max_level_shift_on_last_doubling: last_shift,
    })
}

/// Starting cutoff for a model point:
/// `ceil(4 (g~/w(g))² + 8 zf + 40)` with squeeze factor
/// `zf = 1 / (1 - tanh|zeta|) - 1`, which tracks the geometric Fock tail of a
/// squeezed vacuum. Never below `trunc.n_max()`.
pub fn initial_cutoff(p: &ModelParams, trunc: &Truncation) -> Truncation {
    let image = hb_map(p);
    let beta = image.g_tilde / image.omega_g;
    let squeeze_factor = 1.0 / (1.0 - libm::tanh(image.zeta.abs())) - 1.0;
    let n = libm::ceil(4.0 * beta * beta + 8.0 * squeeze_factor + 40.0) as usize;
    trunc.with_cutoff(n.max(trunc.n_max()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SusyClass {
    Unbroken,
    SpontaneouslyBroken,
    CrushedNoGo,
}

impl SusyClass {
    pub fn name(&self) -> &'static str {
        match self {
            SusyClass::Unbroken => "unbroken",
            SusyClass::SpontaneouslyBroken => "spontaneously_broken",
            SusyClass::CrushedNoGo => "crushed_no_go",
        }
    }
}

/// Thresholds for [`classify_susy`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SusyCriteria {
    /// Splitting below which the ground doublet counts as degenerate.
    pub tol: f64,
    /// Coefficient `omega` of the persistent `-(omega/2) sigma_x` term.
    pub atomic_frequency: f64,
    /// Bare cavity frequency `omega_c`.
    pub cavity_frequency: f64,
    /// Renormalized oscillator frequency `w(g)`.
    pub oscillator_frequency: f64,
    /// Relative band for the no-go signature.
    pub band: f64,
}

impl SusyCriteria {
    pub const DEFAULT_REL_TOL: f64 = 1e-6;
    pub const DEFAULT_BAND: f64 = 0.15;

    /// Degeneracy tolerance `1e-6 * omega_c`.
    pub fn new(atomic_frequency: f64, cavity_frequency: f64, oscillator_frequency: f64) -> Self {
        Self {
            tol: Self::DEFAULT_REL_TOL * cavity_frequency,
            atomic_frequency,
            cavity_frequency,
            oscillator_frequency,
            band: Self::DEFAULT_BAND,
        }
    }

    pub fn for_params(p: &ModelParams) -> Self {
        Self::new(p.omega_a(), p.omega_c(), hb_map(p).omega_g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SusyReport {
    pub classification: SusyClass,
    pub ground_energy: f64,
    pub ground_parity: Parity,
    pub ground_degenerate: bool,
    /// `E1 - E0`.
    pub ground_pair_splitting: f64,
    /// Distance from the ground level (doublet counted once) to the next level.
    pub gap_above_ground: f64,
    /// Distance to the lowest level of opposite parity, if one is present.
    pub parity_partner_gap: Option<f64>,
    /// `E2 - E0`.
    pub ladder_spacing: f64,
    pub tolerance_used: f64,
}

/// Classifies the ground state:
///
/// * degenerate opposite-parity doublet at positive energy: spontaneously broken;
/// * unique ground whose parity partner sits `atomic_frequency` above it while
///   the ladder spacing follows `oscillator_frequency`, itself renormalized
///   beyond the bare cavity frequency: crushed by the quadratic term;
/// * any other unique ground: unbroken.
pub fn classify_susy(spec: &Spectrum, criteria: &SusyCriteria) -> Result<SusyReport> {
    if !spec.converged {
        return Err(Error::Unconverged);
    }
    if spec.levels.len() < 3 {
        return Err(Error::TooFewLevels {
            needed: 3,
            found: spec.levels.len(),
        });
    }
    let levels = &spec.levels;
    let ground = levels[0];
    let splitting = levels[1].energy - ground.energy;
    let degenerate = splitting < criteria.tol;
    let ladder_spacing = levels[2].energy - ground.energy;
    let parity_partner_gap = levels
        .iter()
        .find(|l| l.parity != ground.parity)
        .map(|l| l.energy - ground.energy);
    let gap_above_ground = if degenerate { ladder_spacing } else { splitting };

    let classification = if degenerate {
        if levels[1].parity != ground.parity && ground.energy > criteria.tol {
            SusyClass::SpontaneouslyBroken
        } else {
            return Err(Error::UnclassifiableGround);
        }
    } else {
        let band = criteria.band;
        let omega = criteria.atomic_frequency;
        let omega_g = criteria.oscillator_frequency;
        let partner_tracks_atom = parity_partner_gap
            .map(|gap| omega > 0.0 && (gap - omega).abs() <= band * omega)
            .unwrap_or(false);
        let spacing_tracks_oscillator = omega_g > 0.0 && (ladder_spacing / omega_g - 1.0).abs() <= band;
        let renormalized = omega_g > (1.0 + band) * criteria.cavity_frequency;
        if partner_tracks_atom && spacing_tracks_oscillator && renormalized {
            SusyClass::CrushedNoGo
        } else {
            SusyClass::Unbroken
        }
    };

    Ok(SusyReport {
        classification,
        ground_energy: ground.energy,
        ground_parity: ground.parity,
        ground_degenerate: degenerate,
        ground_pair_splitting: splitting,
        gap_above_ground,
        parity_partner_gap,
        ladder_spacing,
        tolerance_used: criteria.tol,
    })
}

/// Dense matrix `diag(values)` wrapped as a Hermitian operator.
pub fn diagonal_operator(values: &[f64]) -> HermitianOperator {
    let n = values.len();
    let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(if i == j { values[i] } else { 0.0 }, 0.0));
    HermitianOperator::new(m).expect("diagonal real matrix")
}
