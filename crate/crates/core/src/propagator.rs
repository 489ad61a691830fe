//! Closed-form nonunitary propagators.
//!
//! For both families `H² = γ²κ·I` with a scalar `κ`, so
//! `exp(−iHt) = f(t)·I − i·g(t)·H/γ` where `(f, g)` is `(cos, sin/ω)`,
//! `(cosh, sinh/ω)` or `(1, t)` depending on the sign of `κ`. For APT this is
//! the `[[A − iB, C], [C, A + iB]]` form with real `A`, `B`, `C`.

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::linalg::{kron, ComplexMatrix2, ComplexMatrix4, Matrix, C64, I};
use crate::model::{classify, hamiltonian, AptParams, Family, Regime, DEFAULT_EP_TOLERANCE};
use crate::{Error, Result};

/// Real coefficients of the APT propagator `[[A − iB, C], [C, A + iB]]`.
///
/// `A² + B² − C² = 1` in every regime.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagatorAbc {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub regime: Regime,
}

impl PropagatorAbc {
    pub fn matrix(&self) -> ComplexMatrix2 {
        let diag = C64::new(self.a, -self.b);
        let off = C64::new(self.c, 0.0);
        Matrix([[diag, off], [off, diag.conj()]])
    }
}

/// `(f, g)` such that `exp(−iHt) = f·I − i·g·H/γ`, evaluated at scaled time
/// `s = γt`.
fn trig_pair(kappa: f64, regime: Regime, s: f64) -> (f64, f64) {
    match regime {
        Regime::ExceptionalPoint => (1.0, s),
        _ if kappa > 0.0 => {
            let w = kappa.sqrt();
            ((w * s).cos(), (w * s).sin() / w)
        }
        _ => {
            let w = (-kappa).sqrt();
            ((w * s).cosh(), (w * s).sinh() / w)
        }
    }
}

/// `A`, `B`, `C` for an APT qubit at time `t`.
pub fn abc(p: &AptParams, t: f64) -> Result<PropagatorAbc> {
    if p.family() != Family::Apt {
        return Err(Error::Domain {
            operation: "abc",
            requirement: "the APT family",
            a: p.a(),
        });
    }
    let regime = classify(p, DEFAULT_EP_TOLERANCE);
    let (f, g) = trig_pair(p.square_coefficient(), regime, p.gamma() * t);
    Ok(PropagatorAbc {
        a: f,
        b: p.a() * g,
        c: g,
        regime,
    })
}

/// `exp(−iHt)` from the closed form.
pub fn closed_form(p: &AptParams, t: f64) -> ComplexMatrix2 {
    let regime = classify(p, DEFAULT_EP_TOLERANCE);
    let (f, g) = trig_pair(p.square_coefficient(), regime, p.gamma() * t);
    let h = hamiltonian(p).scale_real(1.0 / p.gamma());
    Matrix::<2>::identity().scale_real(f) - h.scale(I * g)
}

/// `U₁(t) ⊗ U₂(t)`.
pub fn two_qubit(p1: &AptParams, p2: &AptParams, t: f64) -> ComplexMatrix4 {
    kron(&closed_form(p1, t), &closed_form(p2, t))
}

/// What drives a single qubit: a Hamiltonian, or nothing at all.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QubitDrive {
    Hamiltonian(AptParams),
    /// The qubit is left alone (`U = I` at every time).
    Identity,
}

impl QubitDrive {
    pub fn propagator(&self, t: f64) -> ComplexMatrix2 {
        match self {
            QubitDrive::Hamiltonian(p) => closed_form(p, t),
            QubitDrive::Identity => Matrix::identity(),
        }
    }

    pub fn params(&self) -> Option<&AptParams> {
        match self {
            QubitDrive::Hamiltonian(p) => Some(p),
            QubitDrive::Identity => None,
        }
    }
}

impl From<AptParams> for QubitDrive {
    fn from(p: AptParams) -> Self {
        QubitDrive::Hamiltonian(p)
    }
}

/// `U₁(t) ⊗ U₂(t)` for arbitrary drives.
pub fn two_qubit_drives(q1: &QubitDrive, q2: &QubitDrive, t: f64) -> ComplexMatrix4 {
    kron(&q1.propagator(t), &q2.propagator(t))
}
