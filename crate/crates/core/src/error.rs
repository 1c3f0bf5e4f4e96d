use alloc::string::String;

/// Failures raised by operator construction, diagonalization and the oracles.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid truncation: {0}")]
    InvalidTruncation(&'static str),
    #[error("invalid model parameters: {0}")]
    InvalidParams(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (max |M - M^dagger| = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error(
        "truncation inadequate: unitarity defect {unitarity_defect:e}, \
         edge weight {edge_weight:e}, tolerance {tolerance:e}"
    )]
    TruncationInadequate {
        unitarity_defect: f64,
        edge_weight: f64,
        tolerance: f64,
    },
    #[error("eigensolver produced non-finite output")]
    NonFiniteEigenvalues,
    #[error("level {index} has mixed parity (<P> = {expectation})")]
    MixedParity { index: usize, expectation: f64 },
    #[error("spectrum is not converged")]
    Unconverged,
    #[error("need at least {needed} levels, found {found}")]
    TooFewLevels { needed: usize, found: usize },
    #[error("degenerate ground doublet cannot be classified (same parity or non-positive energy)")]
    UnclassifiableGround,
    #[error("the polaron-frame identity requires C = 0, got C = {0}")]
    QuadraticTermPresent(f64),
    #[error("invalid limit context: {0}")]
    InvalidLimitContext(&'static str),
    #[error("invalid sweep: {0}")]
    InvalidSweep(&'static str),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

pub type Result<T> = core::result::Result<T, Error>;
