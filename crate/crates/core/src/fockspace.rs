//! Operators on the truncated single-mode Fock space, the spin-1/2 space and
//! their tensor product.
//!
//! Full-space basis index is `spin * (n_max + 1) + n`, with spin index 0 the
//! excited state (sigma_z = +1) and 1 the ground state (sigma_z = -1).
//!
//! Quadratic boson operators are built from their exact matrix elements, so
//! every operator at cutoff `n_max` is the compression of the one at a larger
//! cutoff. That keeps eigenvalues monotone in the cutoff.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix};

/// Fock-space cutoff and the convergence policy used by the adaptive solver.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Truncation {
    n_max: usize,
    rel_tol: f64,
    max_doublings: u32,
}

impl Truncation {
    pub const DEFAULT_REL_TOL: f64 = 1e-10;
    pub const DEFAULT_MAX_DOUBLINGS: u32 = 4;

    pub fn new(n_max: usize, rel_tol: f64, max_doublings: u32) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidTruncation("n_max must be at least 1"));
        }
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::InvalidTruncation("rel_tol must be positive and finite"));
        }
        Ok(Self {
            n_max,
            rel_tol,
            max_doublings,
        })
    }

    /// Cutoff `n_max` with the default convergence policy.
    pub fn with_n_max(n_max: usize) -> Result<Self> {
        Self::new(n_max, Self::DEFAULT_REL_TOL, Self::DEFAULT_MAX_DOUBLINGS)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_doublings(&self) -> u32 {
        self.max_doublings
    }

    pub fn boson_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn full_dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    /// Same policy, different cutoff (clamped to at least 1).
    pub fn with_cutoff(&self, n_max: usize) -> Self {
        Self {
            n_max: n_max.max(1),
            ..*self
        }
    }

    pub fn doubled(&self) -> Self {
        self.with_cutoff(2 * self.n_max)
    }
}

/// Dense Hermitian matrix with its Hermiticity defect certified at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
    hermitian_defect: f64,
}

impl HermitianOperator {
    /// Relative bound on `max |M - M^dagger|` accepted as Hermitian.
    pub const DEFECT_BOUND: f64 = 1e-12;

    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let hermitian_defect = linalg::hermitian_defect(&matrix);
        if hermitian_defect > Self::DEFECT_BOUND * linalg::max_abs(&matrix) {
            return Err(Error::NotHermitian {
                defect: hermitian_defect,
            });
        }
        Ok(Self {
            matrix,
            hermitian_defect,
        })
    }

    pub(crate) fn from_real(matrix: RMatrix) -> Result<Self> {
        Self::new(linalg::to_complex(&matrix))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.hermitian_defect
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|z| z.im == 0.0)
    }

    /// `self + shift * I`.
    pub fn shifted(mut self, shift: f64) -> Self {
        for i in 0..self.dim() {
            self.matrix[(i, i)] += Complex64::new(shift, 0.0);
        }
        self
    }

    /// Largest entry modulus of the commutator `[self, other]`.
    pub fn commutator_max(&self, other: &HermitianOperator) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let ab = &self.matrix * &other.matrix;
        let ba = &other.matrix * &self.matrix;
        Ok(linalg::max_abs_diff(&ab, &ba))
    }
}

/// Dense matrix that is unitary up to truncation effects.
///
/// `unitarity_defect` is `max |U^dagger U - I|`. Exponentials of truncated
/// anti-Hermitian generators are unitary to rounding no matter how poor the
/// cutoff is, so `edge_weight` is recorded as well: the largest probability a
/// lower-half basis vector is sent onto the top Fock level. A small edge weight
/// means the lower half of the basis is represented faithfully.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
    boson_dim: usize,
    unitarity_defect: f64,
    edge_weight: f64,
}

impl UnitaryOperator {
    pub fn new(matrix: CMatrix, boson_dim: usize) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if boson_dim == 0 || !matrix.nrows().is_multiple_of(boson_dim) {
            return Err(Error::DimensionMismatch {
                expected: boson_dim,
                found: matrix.nrows(),
            });
        }
        let unitarity_defect = linalg::unitarity_defect(&matrix);
        let edge_weight = edge_weight(&matrix, boson_dim, boson_dim.div_ceil(2));
        Ok(Self {
            matrix,
            boson_dim,
            unitarity_defect,
            edge_weight,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.unitarity_defect
    }

    pub fn edge_weight(&self) -> f64 {
        self.edge_weight
    }

    /// Edge weight over basis vectors with Fock index below `k` instead of the
    /// lower half.
    pub fn edge_weight_below(&self, k: usize) -> f64 {
        edge_weight(&self.matrix, self.boson_dim, k.min(self.boson_dim))
    }

    /// `TruncationInadequate` when either defect measure exceeds `tolerance`.
    pub fn check(&self, tolerance: f64) -> Result<&Self> {
        if self.unitarity_defect > tolerance || self.edge_weight > tolerance {
            return Err(Error::TruncationInadequate {
                unitarity_defect: self.unitarity_defect,
                edge_weight: self.edge_weight,
                tolerance,
            });
        }
        Ok(self)
    }
}

fn edge_weight(u: &CMatrix, boson_dim: usize, lower: usize) -> f64 {
    let top = boson_dim - 1;
    let mut worst: f64 = 0.0;
    for col in 0..u.ncols() {
        if col % boson_dim >= lower {
            continue;
        }
        let weight: f64 = (0..u.nrows())
            .filter(|row| row % boson_dim == top)
            .map(|row| u[(row, col)].norm_sqr())
            .sum();
        worst = worst.max(weight);
    }
    worst
}

fn real_annihilation(trunc: &Truncation) -> RMatrix {
    let d = trunc.boson_dim();
    DMatrix::from_fn(d, d, |i, j| if j == i + 1 { libm::sqrt(j as f64) } else { 0.0 })
}

/// Exact matrix elements of `a^2`.
fn real_annihilation_squared(trunc: &Truncation) -> RMatrix {
    let d = trunc.boson_dim();
    DMatrix::from_fn(d, d, |i, j| {
        if j == i + 2 {
            libm::sqrt((j * (j - 1)) as f64)
        } else {
            0.0
        }
    })
}

/// Boson annihilation operator: `<n-1|a|n> = sqrt(n)`.
pub fn annihilation(trunc: &Truncation) -> CMatrix {
    linalg::to_complex(&real_annihilation(trunc))
}

pub fn creation(trunc: &Truncation) -> CMatrix {
    annihilation(trunc).adjoint()
}

/// `a^dagger a`.
pub fn number(trunc: &Truncation) -> CMatrix {
    let d = trunc.boson_dim();
    CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(i as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `a + a^dagger`.
pub fn quadrature(trunc: &Truncation) -> CMatrix {
    let a = real_annihilation(trunc);
    linalg::to_complex(&(&a + a.transpose()))
}

/// `(a + a^dagger)^2` from its exact matrix elements:
/// diagonal `2n + 1`, second off-diagonals `sqrt(n (n - 1))`.
pub fn quadrature_squared(trunc: &Truncation) -> CMatrix {
    let a2 = real_annihilation_squared(trunc);
    let d = trunc.boson_dim();
    let diag = RMatrix::from_fn(d, d, |i, j| if i == j { (2 * i + 1) as f64 } else { 0.0 });
    linalg::to_complex(&(&a2 + a2.transpose() + diag))
}

pub fn boson_identity(trunc: &Truncation) -> CMatrix {
    CMatrix::identity(trunc.boson_dim(), trunc.boson_dim())
}

/// Selector for the spin-1/2 operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
    /// `sigma_+ = (sigma_x + i sigma_y) / 2`, maps ground to excited.
    Plus,
    /// `sigma_- = (sigma_x - i sigma_y) / 2`.
    Minus,
}

/// 2x2 spin operator in the (excited, ground) basis.
pub fn pauli(axis: PauliAxis) -> CMatrix {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let entries = match axis {
        PauliAxis::X => [z, one, one, z],
        PauliAxis::Y => [z, -i, i, z],
        PauliAxis::Z => [one, z, z, -one],
        PauliAxis::Plus => [z, one, z, z],
        PauliAxis::Minus => [z, z, one, z],
    };
    CMatrix::from_row_slice(2, 2, &entries)
}

pub fn spin_identity() -> CMatrix {
    CMatrix::identity(2, 2)
}

/// Kronecker product with the spin factor in the leading slot.
pub fn tensor(spin_op: &CMatrix, boson_op: &CMatrix) -> Result<CMatrix> {
    if spin_op.nrows() != 2 || spin_op.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: spin_op.nrows().max(spin_op.ncols()),
        });
    }
    if boson_op.nrows() != boson_op.ncols() {
        return Err(Error::DimensionMismatch {
            expected: boson_op.nrows(),
            found: boson_op.ncols(),
        });
    }
    Ok(spin_op.kronecker(boson_op))
}

/// Displacement operator `D(beta) = exp[beta (a^dagger - a)]` for real `beta`.
pub fn displacement(beta: f64, trunc: &Truncation) -> UnitaryOperator {
    let a = real_annihilation(trunc);
    let generator = (a.transpose() - a) * beta;
    unitary_from_generator(&generator, trunc)
}

/// One-mode squeeze `S(zeta) = exp[(zeta / 2)(a^2 - a^dagger^2)]`.
///
/// Conjugation rescales the quadrature: `S^dagger (a + a^dagger) S =
/// e^{-zeta} (a + a^dagger)`.
pub fn squeeze(zeta: f64, trunc: &Truncation) -> UnitaryOperator {
    let a2 = real_annihilation_squared(trunc);
    let generator = (&a2 - a2.transpose()) * (0.5 * zeta);
    unitary_from_generator(&generator, trunc)
}

fn unitary_from_generator(generator: &RMatrix, trunc: &Truncation) -> UnitaryOperator {
    let u = linalg::to_complex(&linalg::expm(generator));
    UnitaryOperator::new(u, trunc.boson_dim()).expect("square by construction")
}

/// Sign of the parity operator on full-space basis index `index`.
pub fn parity_sign(index: usize, trunc: &Truncation) -> i8 {
    let d = trunc.boson_dim();
    let spin = if index / d == 0 { 1 } else { -1 };
    let fock = if (index % d).is_multiple_of(2) { 1 } else { -1 };
    spin * fock
}

/// Parity `sigma_z (-1)^{a^dagger a}`; diagonal with entries +-1.
pub fn parity(trunc: &Truncation) -> HermitianOperator {
    let n = trunc.full_dim();
    let m = RMatrix::from_fn(n, n, |i, j| if i == j { parity_sign(i, trunc) as f64 } else { 0.0 });
    HermitianOperator::from_real(m).expect("diagonal real matrix")
}
