//! Spectral toolkit for the quantum Rabi model with a quadratic `(a + a†)²`
//! term on a truncated spin ⊗ Fock space.
//!
//! The crate is `no_std` and needs only `alloc`. Every operator is a dense
//! matrix built deterministically from its parameters and cutoff.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod fockspace;
pub mod linalg;
pub mod model;
pub mod spectra;
pub mod sweeps;
pub mod verify;

pub use error::{Error, Result};
pub use fockspace::{HermitianOperator, Truncation, UnitaryOperator};
pub use model::{hb_map, HbImage, LimitHamiltonian, ModelParams, RScheme, Schedule};
pub use spectra::{Level, Parity, Spectrum, SusyClass, SusyCriteria, SusyReport};
