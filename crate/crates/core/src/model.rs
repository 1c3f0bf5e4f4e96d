//! Hamiltonian builders and the closed-form parameter maps between them.
//!
//! The full model is
//!
//! ```text
//! H(wa, wc, g, C) = (wa/2) sz + wc (a†a + 1/2) + g sx (a + a†) + C g² (a + a†)²
//! ```
//!
//! with hbar = 1. The quadratic term is absorbed by a one-mode squeeze into a
//! renormalized frequency `w(g) = sqrt(wc² + 4 C wc g²)` and coupling
//! `g~ = g sqrt(wc / w(g))`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fockspace::{self, HermitianOperator, PauliAxis, Truncation, UnitaryOperator};
use crate::linalg::CMatrix;
use num_complex::Complex64;

/// Physical parameters `(omega_a, omega_c, g, C)` of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelParams {
    omega_a: f64,
    omega_c: f64,
    g: f64,
    c: f64,
}

impl ModelParams {
    pub fn new(omega_a: f64, omega_c: f64, g: f64, c: f64) -> Result<Self> {
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return Err(Error::InvalidParams("omega_c must be positive and finite"));
        }
        for (value, msg) in [
            (omega_a, "omega_a must be non-negative and finite"),
            (g, "g must be non-negative and finite"),
            (c, "C must be non-negative and finite"),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidParams(msg));
            }
        }
        Ok(Self { omega_a, omega_c, g, c })
    }

    /// Resonant model `omega_a = omega_c = omega`.
    pub fn resonant(omega: f64, g: f64, c: f64) -> Result<Self> {
        Self::new(omega, omega, g, c)
    }

    pub fn omega_a(&self) -> f64 {
        self.omega_a
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Coefficient of the quadratic `(a + a†)²` term.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Parameters of the unitarily equivalent model without quadratic term.
    pub fn hb_image_params(&self) -> ModelParams {
        let image = hb_map(self);
        ModelParams {
            omega_a: self.omega_a,
            omega_c: image.omega_g,
            g: image.g_tilde,
            c: 0.0,
        }
    }
}

/// Renormalized frequency, coupling and squeeze parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HbImage {
    pub omega_g: f64,
    pub g_tilde: f64,
    /// Argument of [`fockspace::squeeze`] that carries the full model onto
    /// its image: `zeta = ln(omega_g / omega_c) / 2`.
    pub zeta: f64,
}

/// Closed-form Hopfield-Bogoliubov parameter map.
pub fn hb_map(p: &ModelParams) -> HbImage {
    let omega_g = libm::sqrt(p.omega_c * p.omega_c + 4.0 * p.c * p.omega_c * p.g * p.g);
    HbImage {
        omega_g,
        g_tilde: p.g * libm::sqrt(p.omega_c / omega_g),
        zeta: 0.5 * libm::log(omega_g / p.omega_c),
    }
}

/// Scalar shift that makes the large-coupling limit finite:
/// `g~² / w(g)`, which reduces to `g² / wc` at `C = 0`.
pub fn limit_shift(p: &ModelParams) -> f64 {
    let image = hb_map(p);
    image.g_tilde * image.g_tilde / image.omega_g
}

/// Atom frequency profile `omega[r] = omega0 * f(r)` with `f(0) = 1`, `f(1) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Schedule {
    /// `1 - r`
    #[default]
    Linear,
    /// `(1 - r)²`
    Quadratic,
    /// `1 - (3r² - 2r³)`
    Smoothstep,
}

impl Schedule {
    pub const ALL: [Schedule; 3] = [Schedule::Linear, Schedule::Quadratic, Schedule::Smoothstep];

    pub fn fraction(&self, r: f64) -> f64 {
        match self {
            Schedule::Linear => 1.0 - r,
            Schedule::Quadratic => (1.0 - r) * (1.0 - r),
            Schedule::Smoothstep => 1.0 - r * r * (3.0 - 2.0 * r),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Schedule::Linear => "linear",
            Schedule::Quadratic => "quadratic",
            Schedule::Smoothstep => "smoothstep",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// Parameterization `omega_a = omega[r]`, `omega_c = omega0`, `g = r g0`,
/// `r` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RScheme {
    omega0: f64,
    g0: f64,
    c: f64,
    schedule: Schedule,
}

impl RScheme {
    pub fn new(omega0: f64, g0: f64, c: f64, schedule: Schedule) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::InvalidParams("omega0 must be positive and finite"));
        }
        if !(g0 > 0.0 && g0.is_finite()) {
            return Err(Error::InvalidParams("g0 must be positive and finite"));
        }
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidParams("C must be non-negative and finite"));
        }
        if schedule.fraction(0.0) != 1.0 || schedule.fraction(1.0) != 0.0 {
            return Err(Error::InvalidParams("schedule must satisfy f(0) = 1 and f(1) = 0"));
        }
        Ok(Self {
            omega0,
            g0,
            c,
            schedule,
        })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    fn check_r(r: f64) -> Result<()> {
        if (0.0..=1.0).contains(&r) {
            Ok(())
        } else {
            Err(Error::InvalidParams("r must lie in [0, 1]"))
        }
    }

    /// Atom frequency `omega[r]`.
    pub fn omega_at(&self, r: f64) -> f64 {
        self.omega0 * self.schedule.fraction(r)
    }

    pub fn params_at(&self, r: f64) -> Result<ModelParams> {
        Self::check_r(r)?;
        ModelParams::new(self.omega_at(r), self.omega0, r * self.g0, self.c)
    }

    /// `sqrt(omega² + 4 C omega r² g0²)`.
    pub fn omega_tilde(&self, r: f64) -> f64 {
        let g = r * self.g0;
        libm::sqrt(self.omega0 * self.omega0 + 4.0 * self.c * self.omega0 * g * g)
    }

    /// `r g0 sqrt(omega / omega_tilde(r))`.
    pub fn g_tilde(&self, r: f64) -> f64 {
        r * self.g0 * libm::sqrt(self.omega0 / self.omega_tilde(r))
    }

    pub fn shift(&self, r: f64) -> f64 {
        let gt = self.g_tilde(r);
        gt * gt / self.omega_tilde(r)
    }
}

/// Full model Hamiltonian on the spin ⊗ Fock space.
pub fn build_hamiltonian(p: &ModelParams, trunc: &Truncation) -> HermitianOperator {
    let c = |x: f64| Complex64::new(x, 0.0);
    let d = trunc.boson_dim();
    let half = fockspace::number(trunc) + CMatrix::identity(d, d) * c(0.5);
    let x = fockspace::quadrature(trunc);
    let x2 = fockspace::quadrature_squared(trunc);

    let spin_id = fockspace::spin_identity();
    let boson_part = half * c(p.omega_c) + x2 * c(p.c * p.g * p.g);
    let m = fockspace::tensor(&fockspace::pauli(PauliAxis::Z), &fockspace::boson_identity(trunc))
        .expect("2x2 spin factor")
        * c(0.5 * p.omega_a)
        + fockspace::tensor(&spin_id, &boson_part).expect("2x2 spin factor")
        + fockspace::tensor(&fockspace::pauli(PauliAxis::X), &x).expect("2x2 spin factor") * c(p.g);
    HermitianOperator::new(m).expect("real symmetric by construction")
}

/// Full model plus [`limit_shift`] times the identity.
pub fn shifted_hamiltonian(p: &ModelParams, trunc: &Truncation) -> HermitianOperator {
    build_hamiltonian(p, trunc).shifted(limit_shift(p))
}

/// Spin-conditioned polaron unitary
/// `U(beta) = [(s- - 1) s+ D(beta) + (s+ + 1) s- D(-beta)] / sqrt(2)`.
pub fn build_polaron_unitary(beta: f64, trunc: &Truncation) -> UnitaryOperator {
    let plus = fockspace::pauli(PauliAxis::Plus);
    let minus = fockspace::pauli(PauliAxis::Minus);
    let id = fockspace::spin_identity();
    let forward = fockspace::displacement(beta, trunc).into_matrix();
    let backward = fockspace::displacement(-beta, trunc).into_matrix();

    let first = (&minus - &id) * &plus;
    let second = (&plus + &id) * &minus;
    let m = (fockspace::tensor(&first, &forward).expect("2x2 spin factor")
        + fockspace::tensor(&second, &backward).expect("2x2 spin factor"))
        * Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    UnitaryOperator::new(m, trunc.boson_dim()).expect("square by construction")
}

/// Model without quadratic term, shifted by `g² / wc`, as seen in the frame of
/// [`build_polaron_unitary`] at `beta = g / wc`:
///
/// ```text
/// wc (a†a + 1/2) - (wa/2) [s+ D(beta)² + s- D(-beta)²]
/// ```
pub fn build_polaron_frame_hamiltonian(p: &ModelParams, trunc: &Truncation) -> Result<HermitianOperator> {
    if p.c != 0.0 {
        return Err(Error::QuadraticTermPresent(p.c));
    }
    let c = |x: f64| Complex64::new(x, 0.0);
    let d = trunc.boson_dim();
    let beta = p.g / p.omega_c;
    let d2 = fockspace::displacement(2.0 * beta, trunc).into_matrix();
    let d2_back = d2.adjoint();
    let oscillator = (fockspace::number(trunc) + CMatrix::identity(d, d) * c(0.5)) * c(p.omega_c);

    let m = fockspace::tensor(&fockspace::spin_identity(), &oscillator)?
        - (fockspace::tensor(&fockspace::pauli(PauliAxis::Plus), &d2)?
            + fockspace::tensor(&fockspace::pauli(PauliAxis::Minus), &d2_back)?)
            * c(0.5 * p.omega_a);
    HermitianOperator::new(m)
}

/// Spectra that the shifted model approaches in its two limits.
///
/// The conjugating unitaries are left out: only spectra are compared.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum LimitHamiltonian {
    /// `C = 0`, `g -> inf`: `omega (a†a + 1/2)`, doubly degenerate.
    StrongCouplingFree { omega: f64 },
    /// `C > 0`, `g -> inf`: `omega_g (a†a + 1/2) - (omega/2) sx`.
    StrongCouplingQuadratic { omega: f64, omega_g: f64 },
    /// `r -> 1`: `omega_tilde (a†a + 1/2)`, doubly degenerate.
    RSchemeEndpoint { omega_tilde: f64 },
}

impl LimitHamiltonian {
    /// Strong-coupling limit of the resonant model at coupling `g`; the
    /// quadratic variant carries `w(g)` evaluated at that coupling.
    pub fn strong_coupling(omega: f64, g: f64, c: f64) -> Result<Self> {
        let p = ModelParams::resonant(omega, g, c)?;
        if c == 0.0 {
            Ok(Self::StrongCouplingFree { omega })
        } else {
            Ok(Self::StrongCouplingQuadratic {
                omega,
                omega_g: hb_map(&p).omega_g,
            })
        }
    }

    pub fn r_scheme_endpoint(scheme: &RScheme) -> Self {
        Self::RSchemeEndpoint {
            omega_tilde: scheme.omega_tilde(1.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        let ok = match *self {
            Self::StrongCouplingFree { omega } => positive(omega),
            Self::StrongCouplingQuadratic { omega, omega_g } => positive(omega) && positive(omega_g),
            Self::RSchemeEndpoint { omega_tilde } => positive(omega_tilde),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidLimitContext("frequencies must be positive and finite"))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::StrongCouplingFree { .. } => "strong_coupling_free",
            Self::StrongCouplingQuadratic { .. } => "strong_coupling_quadratic",
            Self::RSchemeEndpoint { .. } => "r_scheme_endpoint",
        }
    }

    pub fn build(&self, trunc: &Truncation) -> Result<HermitianOperator> {
        self.validate()?;
        let c = |x: f64| Complex64::new(x, 0.0);
        let d = trunc.boson_dim();
        let half = fockspace::number(trunc) + CMatrix::identity(d, d) * c(0.5);
        let spin_id = fockspace::spin_identity();
        let m = match *self {
            Self::StrongCouplingFree { omega } => fockspace::tensor(&spin_id, &(half * c(omega)))?,
            Self::RSchemeEndpoint { omega_tilde } => fockspace::tensor(&spin_id, &(half * c(omega_tilde)))?,
            Self::StrongCouplingQuadratic { omega, omega_g } => {
                fockspace::tensor(&spin_id, &(half * c(omega_g)))?
                    - fockspace::tensor(&fockspace::pauli(PauliAxis::X), &fockspace::boson_identity(trunc))?
                        * c(0.5 * omega)
            }
        };
        HermitianOperator::new(m)
    }

    /// Lowest `count` eigenvalues in closed form, ascending.
    pub fn levels(&self, count: usize) -> Result<Vec<f64>> {
        self.validate()?;
        let mut out = Vec::with_capacity(2 * count);
        for n in 0..count {
            let rung = n as f64 + 0.5;
            match *self {
                Self::StrongCouplingFree { omega } => {
                    out.push(omega * rung);
                    out.push(omega * rung);
                }
                Self::RSchemeEndpoint { omega_tilde } => {
                    out.push(omega_tilde * rung);
                    out.push(omega_tilde * rung);
                }
                Self::StrongCouplingQuadratic { omega, omega_g } => {
                    out.push(omega_g * rung - 0.5 * omega);
                    out.push(omega_g * rung + 0.5 * omega);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.truncate(count);
        Ok(out)
    }
}
