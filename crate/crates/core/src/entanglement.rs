//! Wootters concurrence and closed forms for the Bell-state trajectories.

use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::dynamics::{DensityMatrix, EIGENVALUE_FLOOR};
use crate::linalg::{column, eigh, kron, sigma_y, sqrt_psd, C64};
use crate::model::Family;
use crate::{Error, Result};

/// Largest eigenvalue of ρ above which the pure-state formula is used.
const PURE_STATE_THRESHOLD: f64 = 1.0 - 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcurrenceReport {
    pub value: f64,
    /// Eigenvalues of `ρ(σy⊗σy)ρ*(σy⊗σy)`, clamped at zero, descending.
    pub r_eigenvalues: [f64; 4],
}

/// `2|c₀₀c₁₁ − c₀₁c₁₀| / ⟨ψ|ψ⟩`
pub fn pure_state_concurrence(psi: &[C64; 4]) -> f64 {
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    (2.0 * (psi[0] * psi[3] - psi[1] * psi[2]).norm() / norm).min(1.0)
}

/// Concurrence of a two-qubit state.
///
/// Pure states (largest eigenvalue above `1 − 1e-12`) use the amplitude
/// formula. Mixed states use the Hermitian form `√ρ·ρ̃·√ρ`, which shares its
/// spectrum with `R = ρρ̃`; spectra more negative than −1e-10 are rejected.
pub fn concurrence(rho: &DensityMatrix) -> Result<ConcurrenceReport> {
    let m = rho.matrix();
    let (values, vectors) = eigh(m);
    if values[3] > PURE_STATE_THRESHOLD {
        let value = pure_state_concurrence(&column(&vectors, 3));
        return Ok(ConcurrenceReport {
            value,
            r_eigenvalues: [value * value, 0.0, 0.0, 0.0],
        });
    }

    let yy = kron(&sigma_y(), &sigma_y());
    let flipped = yy * m.conj() * yy;
    let root = sqrt_psd(m);
    let (lambdas, _) = eigh(&(root * flipped * root));
    if lambdas[0] < EIGENVALUE_FLOOR {
        return Err(Error::InvalidState {
            reason: "spin-flipped product has a negative eigenvalue",
            value: lambdas[0],
        });
    }
    let r = [lambdas[3], lambdas[2], lambdas[1], lambdas[0]].map(|x| x.max(0.0));
    let value = r[0].sqrt() - r[1].sqrt() - r[2].sqrt() - r[3].sqrt();
    Ok(ConcurrenceReport {
        value: value.clamp(0.0, 1.0),
        r_eigenvalues: r,
    })
}

fn require_unbroken_apt(operation: &'static str, a: f64) -> Result<f64> {
    if a > 1.0 && a.is_finite() {
        Ok(a * a - 1.0)
    } else {
        Err(Error::Domain {
            operation,
            requirement: "a > 1",
            a,
        })
    }
}

/// Bell-state concurrence when both qubits share the same APT parameter
/// `a > 1`: `w² / (w² + 8ws + 8s²)` with `w = a² − 1`, `s = sin²(√w·t)`.
pub fn analytic_concurrence_identical(a: f64, t: f64) -> Result<f64> {
    let w = require_unbroken_apt("analytic_concurrence_identical", a)?;
    let s = (w.sqrt() * t).sin().powi(2);
    Ok(w * w / (w * w + 8.0 * w * s + 8.0 * s * s))
}

/// Bell-state concurrence when only qubit 1 evolves (APT, `a > 1`):
/// `w / (w + 2s)`.
pub fn analytic_concurrence_single_qubit(a: f64, t: f64) -> Result<f64> {
    let w = require_unbroken_apt("analytic_concurrence_single_qubit", a)?;
    let s = (w.sqrt() * t).sin().powi(2);
    Ok(w / (w + 2.0 * s))
}

/// Period of the concurrence oscillation in the unbroken regime of `family`.
pub fn concurrence_period(a: f64, family: Family) -> Result<f64> {
    let kappa = match family {
        Family::Apt => a * a - 1.0,
        Family::Pt => 1.0 - a * a,
    };
    if !(a > 0.0) || !(kappa > 0.0) || !a.is_finite() {
        return Err(Error::Domain {
            operation: "concurrence_period",
            requirement: match family {
                Family::Apt => "APT with a > 1",
                Family::Pt => "PT with 0 < a < 1",
            },
            a,
        });
    }
    Ok(PI / kappa.sqrt())
}

/// Minimum of [`analytic_concurrence_identical`], reached where `s = 1`.
pub fn concurrence_minimum_identical(a: f64) -> Result<f64> {
    let w = require_unbroken_apt("concurrence_minimum_identical", a)?;
    Ok(w * w / (w * w + 8.0 * w + 8.0))
}

/// Bell-state concurrence with both qubits at the exceptional point:
/// `1 / (1 + 8t² + 8t⁴)`.
pub fn ep_concurrence(t: f64) -> f64 {
    let t2 = t * t;
    1.0 / (1.0 + 8.0 * t2 + 8.0 * t2 * t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve_state;
    use crate::linalg::{Matrix, ONE, ZERO};
    use crate::model::AptParams;

    fn ket(bits: [f64; 4]) -> [C64; 4] {
        bits.map(|x| C64::new(x, 0.0))
    }

    #[test]
    fn reference_states() {
        assert!((concurrence(&DensityMatrix::bell()).unwrap().value - 1.0).abs() < 1e-14);
        assert!(concurrence(&DensityMatrix::maximally_mixed()).unwrap().value.abs() < 1e-14);
        let product = DensityMatrix::from_pure(&ket([1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(concurrence(&product).unwrap().value.abs() < 1e-14);
    }

    #[test]
    fn werner_state_uses_mixed_route() {
        // p·|Ψ⁺⟩⟨Ψ⁺| + (1−p)·I/4 has C = max(0, (3p − 1)/2).
        let bell = *DensityMatrix::bell().matrix();
        for &p in &[0.2, 1.0 / 3.0, 0.5, 0.8, 0.95] {
            let rho = bell.scale_real(p) + Matrix::<4>::identity().scale_real((1.0 - p) / 4.0);
            let report = concurrence(&DensityMatrix::new(rho).unwrap()).unwrap();
            let expected = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert!((report.value - expected).abs() < 1e-10, "p={p}");
            assert!(report.r_eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn analytic_identical_reference_points() {
        assert!((analytic_concurrence_identical(1.2, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let w: f64 = 0.44;
        let t_min = (PI / 2.0) / w.sqrt();
        let c = analytic_concurrence_identical(1.2, t_min).unwrap();
        assert!((c - 0.1936 / 11.7136).abs() < 1e-12);
        assert!((c - 0.016527).abs() < 1e-6);
        let w: f64 = 2.24;
        let c = analytic_concurrence_identical(1.8, (PI / 2.0) / w.sqrt()).unwrap();
        assert!((c - 5.0176 / 30.9376).abs() < 1e-12);
        assert!((c - 0.16219).abs() < 1e-5);
    }

    #[test]
    fn analytic_forms_reject_broken_regime() {
        assert!(analytic_concurrence_identical(1.0, 1.0).is_err());
        assert!(analytic_concurrence_identical(0.8, 1.0).is_err());
        assert!(concurrence_minimum_identical(0.9).is_err());
        assert!(analytic_concurrence_single_qubit(1.0, 1.0).is_err());
    }

    #[test]
    fn period_reference_values() {
        assert!((concurrence_period(2f64.sqrt(), Family::Apt).unwrap() - PI).abs() < 1e-12);
        assert!((concurrence_period(1.2, Family::Apt).unwrap() - 4.7360).abs() < 5e-4);
        let a_pt = (1.0 - 0.44f64).sqrt();
        let apt = concurrence_period(1.2, Family::Apt).unwrap();
        let pt = concurrence_period(a_pt, Family::Pt).unwrap();
        assert!((apt - pt).abs() < 1e-12);
        assert!(concurrence_period(0.8, Family::Apt).is_err());
        assert!(concurrence_period(1.2, Family::Pt).is_err());
        assert!(concurrence_period(1.0, Family::Apt).is_err());
    }

    #[test]
    fn minimum_reference_values() {
        assert!((concurrence_minimum_identical(1.2).unwrap() - 0.016527).abs() < 1e-6);
        assert!((concurrence_minimum_identical(1.8).unwrap() - 0.16219).abs() < 1e-5);
        assert!(concurrence_minimum_identical(1e4).unwrap() > 0.9999);
    }

    #[test]
    fn ep_reference_values() {
        assert_eq!(ep_concurrence(0.0), 1.0);
        assert!((ep_concurrence(1.0) - 1.0 / 17.0).abs() < 1e-15);
        assert!((ep_concurrence(10.0) - 1.0 / 80801.0).abs() < 1e-15);
    }

    #[test]
    fn analytic_forms_match_brute_force() {
        let bell = DensityMatrix::bell();
        for &a in &[1.05, 1.2, 1.8, 3.0] {
            let p = AptParams::apt(a).unwrap();
            for k in 0..60 {
                let t = k as f64 * 0.13;
                let rho = evolve_state(&bell, p, p, t).unwrap();
                let brute = concurrence(&rho).unwrap().value;
                let closed = analytic_concurrence_identical(a, t).unwrap();
                assert!((brute - closed).abs() < 1e-10, "a={a} t={t}");

                let rho = evolve_state(&bell, p, crate::propagator::QubitDrive::Identity, t).unwrap();
                let brute = concurrence(&rho).unwrap().value;
                let closed = analytic_concurrence_single_qubit(a, t).unwrap();
                assert!((brute - closed).abs() < 1e-10, "single a={a} t={t}");
            }
        }
        let ep = AptParams::apt(1.0).unwrap();
        for k in 0..40 {
            let t = k as f64 * 0.25;
            let brute = concurrence(&evolve_state(&bell, ep, ep, t).unwrap()).unwrap().value;
            assert!((brute - ep_concurrence(t)).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn pure_shortcut_agrees_with_mixed_route_on_slightly_mixed_state() {
        // A pure state nudged off purity goes through the Hermitian route and
        // must stay close to the amplitude formula.
        let s = 0.6f64;
        let psi = [C64::new(s, 0.0), ZERO, ZERO, ONE * (1.0 - s * s).sqrt()];
        let pure = Matrix::outer(&psi, &psi);
        let eps = 1e-6;
        let rho = pure.scale_real(1.0 - eps) + Matrix::<4>::identity().scale_real(eps / 4.0);
        let c = concurrence(&DensityMatrix::new(rho).unwrap()).unwrap().value;
        assert!((c - pure_state_concurrence(&psi)).abs() < 1e-5);
    }
}
