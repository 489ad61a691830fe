//! Jones-calculus realization of the APT propagator.
//!
//! `U = [[A − iB, C], [C, A + iB]]` factors as `c · U₂(θ₂) · L(ξ₁, ξ₂) · U₁(θ₁)`
//! where `U₁`, `U₂` are fixed strings of half- and quarter-wave plates with one
//! tunable HWP each and `L = [[0, sin2ξ₁], [sin2ξ₂, 0]]` is the loss element
//! built from two beam displacers with a HWP in each arm.

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::linalg::{ComplexMatrix2, Matrix, C64, ZERO};
use crate::model::AptParams;
use crate::propagator::{abc, closed_form};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WavePlateKind {
    Half,
    Quarter,
}

/// A wave plate with its fast-axis setting angle in degrees, kept in `[0, 180)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WavePlate {
    kind: WavePlateKind,
    angle_deg: f64,
}

impl WavePlate {
    pub fn new(kind: WavePlateKind, angle_deg: f64) -> Self {
        let mut angle = angle_deg % 180.0;
        if angle < 0.0 {
            angle += 180.0;
        }
        if angle >= 180.0 {
            angle = 0.0;
        }
        Self {
            kind,
            angle_deg: angle,
        }
    }

    pub fn half(angle_deg: f64) -> Self {
        Self::new(WavePlateKind::Half, angle_deg)
    }

    pub fn quarter(angle_deg: f64) -> Self {
        Self::new(WavePlateKind::Quarter, angle_deg)
    }

    pub fn kind(&self) -> WavePlateKind {
        self.kind
    }

    pub fn angle_deg(&self) -> f64 {
        self.angle_deg
    }

    pub fn matrix(&self) -> ComplexMatrix2 {
        waveplate_matrix(self)
    }
}

/// Jones matrix of a wave plate.
///
/// HWP: `[[cos2β, sin2β], [sin2β, −cos2β]]`.
/// QWP: `[[cos²α + i·sin²α, sinα·cosα·(1 − i)], [sinα·cosα·(1 − i), sin²α + i·cos²α]]`.
pub fn waveplate_matrix(w: &WavePlate) -> ComplexMatrix2 {
    let angle = w.angle_deg.to_radians();
    match w.kind {
        WavePlateKind::Half => {
            let (s, c) = (2.0 * angle).sin_cos();
            Matrix::from_real([[c, s], [s, -c]])
        }
        WavePlateKind::Quarter => {
            let (s, c) = angle.sin_cos();
            let off = C64::new(s * c, -s * c);
            Matrix([
                [C64::new(c * c, s * s), off],
                [off, C64::new(s * s, c * c)],
            ])
        }
    }
}

/// Ordered product of plates; the first element is the one light meets first.
fn optical_train(plates: &[WavePlate]) -> ComplexMatrix2 {
    plates
        .iter()
        .fold(Matrix::identity(), |acc, p| p.matrix() * acc)
}

/// `U₁(θ) = HWP(0°)·HWP(22.5°)·QWP(45°)·HWP(θ)·QWP(45°)` (rightmost acts first).
pub fn input_stage(theta_deg: f64) -> ComplexMatrix2 {
    optical_train(&[
        WavePlate::quarter(45.0),
        WavePlate::half(theta_deg),
        WavePlate::quarter(45.0),
        WavePlate::half(22.5),
        WavePlate::half(0.0),
    ])
}

/// `U₂(θ) = QWP(45°)·HWP(θ)·QWP(45°)·HWP(67.5°)` (rightmost acts first).
pub fn output_stage(theta_deg: f64) -> ComplexMatrix2 {
    optical_train(&[
        WavePlate::half(67.5),
        WavePlate::quarter(45.0),
        WavePlate::half(theta_deg),
        WavePlate::quarter(45.0),
    ])
}

/// `L(ξ₁, ξ₂) = [[0, sin2ξ₁], [sin2ξ₂, 0]]`.
pub fn loss_operator(xi1_deg: f64, xi2_deg: f64) -> ComplexMatrix2 {
    let s1 = (2.0 * xi1_deg.to_radians()).sin();
    let s2 = (2.0 * xi2_deg.to_radians()).sin();
    Matrix::from_real([[0.0, s1], [s2, 0.0]])
}

/// Wave-plate settings and loss parameters realizing one propagator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecompositionParams {
    pub theta1_deg: f64,
    pub theta2_deg: f64,
    pub xi1_deg: f64,
    pub xi2_deg: f64,
    pub k: i32,
    /// Overall scale: `U = c · reconstruct(…)`.
    pub c: f64,
    /// `√(A² + B²) − C`
    pub lambda1: f64,
    /// `√(A² + B²) + C`
    pub lambda2: f64,
}

/// Branches tried in order of increasing `|k|`.
const BRANCH_CANDIDATES: [i32; 5] = [0, 1, -1, 2, -2];
/// Relative residual below which a branch reproduces the propagator.
const BRANCH_TOLERANCE: f64 = 1e-12;

fn params_for_branch(lambda1: f64, lambda2: f64, phase: f64, k: i32) -> DecompositionParams {
    let c = lambda1.max(lambda2);
    let shift = k as f64 * core::f64::consts::PI;
    DecompositionParams {
        theta1_deg: ((phase + shift) / 4.0).to_degrees(),
        theta2_deg: ((phase - shift) / 4.0).to_degrees(),
        xi1_deg: (0.5 * (lambda1 / c).clamp(0.0, 1.0).asin()).to_degrees(),
        xi2_deg: (0.5 * (lambda2 / c).clamp(0.0, 1.0).asin()).to_degrees(),
        k,
        c,
        lambda1,
        lambda2,
    }
}

/// Wave-plate and loss settings for an APT propagator at time `t`.
///
/// The branch `k` is the smallest `|k|` whose reconstruction reproduces the
/// closed form (odd `k` whenever `C ≠ 0`).
pub fn decompose(p: &AptParams, t: f64) -> Result<DecompositionParams> {
    let coeffs = abc(p, t)?;
    let radius = coeffs.a.hypot(coeffs.b);
    let denominator = radius + coeffs.c.abs();
    if !(denominator > 0.0) || !denominator.is_finite() {
        return Err(Error::DegenerateDecomposition { value: denominator });
    }
    let lambda1 = radius - coeffs.c;
    let lambda2 = radius + coeffs.c;
    let phase = coeffs.b.atan2(coeffs.a);
    let target = closed_form(p, t);
    let scale = target.max_abs();

    let mut best: Option<(f64, DecompositionParams)> = None;
    for &k in BRANCH_CANDIDATES.iter() {
        let d = params_for_branch(lambda1, lambda2, phase, k);
        let residual = reconstruct(&d).scale_real(d.c).max_abs_diff(&target) / scale;
        if residual <= BRANCH_TOLERANCE {
            return Ok(d);
        }
        if best.is_none_or(|(r, _)| residual < r) {
            best = Some((residual, d));
        }
    }
    // Only reachable through rounding at extreme times; keep the closest branch.
    Ok(best.expect("candidate list is non-empty").1)
}

/// The raw Jones product `U₂(θ₂)·L(ξ₁, ξ₂)·U₁(θ₁)` of the optical elements.
pub fn jones_string(d: &DecompositionParams) -> ComplexMatrix2 {
    output_stage(d.theta2_deg) * loss_operator(d.xi1_deg, d.xi2_deg) * input_stage(d.theta1_deg)
}

/// The propagator realized by the optical string, divided by `c`.
///
/// Each `QWP(45°)·HWP(θ)·QWP(45°)` sandwich equals
/// `−i·diag(−e^{−2iθ}, e^{2iθ})`; the two sandwiches contribute an overall
/// `−1`, which is removed here since a global phase has no optical effect.
pub fn reconstruct(d: &DecompositionParams) -> ComplexMatrix2 {
    -jones_string(d)
}

/// Field amplitudes leaving the second beam displacer, per output path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamDisplacerOutput {
    /// Upper output port (blocked).
    pub path1: [C64; 2],
    /// Central port carrying the transmitted photon.
    pub path2: [C64; 2],
    /// Lower output port (blocked).
    pub path3: [C64; 2],
}

impl BeamDisplacerOutput {
    /// Probability that the photon leaves through path 2.
    pub fn survival_probability(&self) -> f64 {
        self.path2.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Propagates a polarization state `α|H⟩ + β|V⟩` through the loss element.
///
/// Each beam displacer passes `V` straight through and shifts `H` down by one
/// path. Between them the upper arm carries `HWP(ξ₁)` and the lower arm
/// `HWP(ξ₂)`. Path 2 ends up holding `L(ξ₁, ξ₂)·(α, β)`.
pub fn bd_circuit(input: &[C64; 2], xi1_deg: f64, xi2_deg: f64) -> BeamDisplacerOutput {
    const H: usize = 0;
    const V: usize = 1;
    // Spatial slots 0 (upper), 1, 2 (lower); each holds an (H, V) amplitude pair.
    let mut slots = [[ZERO; 2]; 3];
    slots[0] = *input;

    let displace = |slots: [[C64; 2]; 3]| {
        let mut out = [[ZERO; 2]; 3];
        for (k, slot) in slots.iter().enumerate() {
            out[k][V] += slot[V];
            if k + 1 < out.len() {
                out[k + 1][H] += slot[H];
            } else {
                debug_assert!(slot[H] == ZERO);
            }
        }
        out
    };

    slots = displace(slots);
    slots[0] = WavePlate::half(xi1_deg).matrix().mul_vec(&slots[0]);
    slots[1] = WavePlate::half(xi2_deg).matrix().mul_vec(&slots[1]);
    slots = displace(slots);

    BeamDisplacerOutput {
        path1: slots[0],
        path2: slots[1],
        path3: slots[2],
    }
}
