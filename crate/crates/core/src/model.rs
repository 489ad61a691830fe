//! Single-qubit APT / PT Hamiltonians and symmetry-regime classification.

use crate::linalg::{eig2, sigma_x, sigma_z, ComplexMatrix2, C64, I};
use crate::{Error, Result};

/// Band around `a = 1` treated as the exceptional point.
pub const DEFAULT_EP_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `H = γ(iσx + aσz)`
    Apt,
    /// `H = γ(σx − iaσz)`
    Pt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    Unbroken,
    ExceptionalPoint,
    Broken,
}

/// Hamiltonian parameters for one qubit.
///
/// `a` is the degree of Hermiticity and `gamma` the energy scale; times used
/// throughout the crate are physical times, and the propagators depend on them
/// only through `gamma * t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AptParams {
    a: f64,
    gamma: f64,
    family: Family,
}

impl AptParams {
    pub fn new(a: f64, gamma: f64, family: Family) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter {
                name: "a",
                value: a,
                reason: "must be finite and > 0",
            });
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "must be finite and > 0",
            });
        }
        Ok(Self { a, gamma, family })
    }

    /// APT qubit with `γ = 1`.
    pub fn apt(a: f64) -> Result<Self> {
        Self::new(a, 1.0, Family::Apt)
    }

    /// PT qubit with `γ = 1`.
    pub fn pt(a: f64) -> Result<Self> {
        Self::new(a, 1.0, Family::Pt)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// `H²/γ² = κ·I`; `κ = a² − 1` for APT, `1 − a²` for PT.
    pub fn square_coefficient(&self) -> f64 {
        match self.family {
            Family::Apt => self.a * self.a - 1.0,
            Family::Pt => 1.0 - self.a * self.a,
        }
    }

    pub fn regime(&self) -> Regime {
        classify(self, DEFAULT_EP_TOLERANCE)
    }
}

/// The traceless single-qubit Hamiltonian.
pub fn hamiltonian(p: &AptParams) -> ComplexMatrix2 {
    let g = C64::new(p.gamma, 0.0);
    let a = C64::new(p.a, 0.0);
    match p.family {
        Family::Apt => (sigma_x().scale(I) + sigma_z().scale(a)).scale(g),
        Family::Pt => (sigma_x() - sigma_z().scale(I * a)).scale(g),
    }
}

/// Symmetry regime of `p`. APT is broken below `a = 1` and PT above it.
pub fn classify(p: &AptParams, eps: f64) -> Regime {
    let eps = eps.max(0.0);
    if (p.a - 1.0).abs() <= eps {
        return Regime::ExceptionalPoint;
    }
    let below = p.a < 1.0;
    match (p.family, below) {
        (Family::Apt, true) | (Family::Pt, false) => Regime::Broken,
        (Family::Apt, false) | (Family::Pt, true) => Regime::Unbroken,
    }
}

/// Eigenvalues of the Hamiltonian, ordered as in [`eig2`].
pub fn eigenvalues(p: &AptParams) -> [C64; 2] {
    eig2(&hamiltonian(p))
}
