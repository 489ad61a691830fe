//! Trace-renormalized evolution of two-qubit states.
//!
//! Every sample is computed from `t = 0` with the closed-form propagator at the
//! absolute time, so trajectories carry no step-composition error and samples
//! are independent of each other.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::entanglement::concurrence;
use crate::linalg::{eigh, ComplexMatrix4, Matrix, C64, ZERO};
use crate::model::AptParams;
use crate::propagator::{two_qubit_drives, QubitDrive};
use crate::{Error, Result};

/// Traces below this are treated as total loss.
pub const NORM_UNDERFLOW: f64 = 1e-300;

const HERMITICITY_TOLERANCE: f64 = 1e-9;
const TRACE_TOLERANCE: f64 = 1e-9;
/// Most negative eigenvalue tolerated as float noise.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// A Hermitian, unit-trace, positive-semidefinite 4×4 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix4);

impl DensityMatrix {
    /// Validates `rho` and stores its Hermitian part.
    ///
    /// Hermiticity and trace are checked to 1e-9, the spectrum against
    /// [`EIGENVALUE_FLOOR`].
    pub fn new(rho: ComplexMatrix4) -> Result<Self> {
        if !rho.is_finite() {
            return Err(Error::InvalidState {
                reason: "non-finite entry",
                value: f64::NAN,
            });
        }
        let defect = rho.hermiticity_defect();
        if defect > HERMITICITY_TOLERANCE {
            return Err(Error::InvalidState {
                reason: "not Hermitian",
                value: defect,
            });
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidState {
                reason: "trace differs from 1",
                value: tr.re,
            });
        }
        let herm = rho.hermitian_part();
        let (values, _) = eigh(&herm);
        if values[0] < EIGENVALUE_FLOOR {
            return Err(Error::InvalidState {
                reason: "negative eigenvalue",
                value: values[0],
            });
        }
        Ok(Self(herm.scale_real(1.0 / herm.trace().re)))
    }

    /// Normalizes an arbitrary positive matrix `m` by its trace. The caller
    /// guarantees positivity (e.g. `m = UρU†`).
    pub(crate) fn from_positive(m: &ComplexMatrix4) -> Self {
        let herm = m.hermitian_part();
        Self(herm.scale_real(1.0 / herm.trace().re))
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn from_pure(psi: &[C64; 4]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm > NORM_UNDERFLOW) || !norm.is_finite() {
            return Err(Error::InvalidState {
                reason: "state vector has no weight",
                value: norm,
            });
        }
        Ok(Self::from_positive(&Matrix::outer(psi, psi)))
    }

    /// `(|01⟩ + |10⟩)/√2`, i.e. `(|HV⟩ + |VH⟩)/√2` with `H = |0⟩`, `V = |1⟩`.
    pub fn bell() -> Self {
        let s = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::from_pure(&[ZERO, s, s, ZERO]).expect("Bell state is normalizable")
    }

    pub fn maximally_mixed() -> Self {
        Self(Matrix::identity().scale_real(0.25))
    }

    pub fn matrix(&self) -> &ComplexMatrix4 {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix4 {
        self.0
    }

    /// `tr ρ²`
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        eigh(&self.0).0
    }
}

/// Initial state and per-qubit drives; evaluates the state at any time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evolution {
    pub qubit1: QubitDrive,
    pub qubit2: QubitDrive,
    pub initial: DensityMatrix,
}

/// Evolved state together with the unnormalized trace `Tr[UρU†]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolvedState {
    pub state: DensityMatrix,
    pub norm: f64,
}

impl Evolution {
    pub fn new(qubit1: impl Into<QubitDrive>, qubit2: impl Into<QubitDrive>) -> Self {
        Self {
            qubit1: qubit1.into(),
            qubit2: qubit2.into(),
            initial: DensityMatrix::bell(),
        }
    }

    pub fn with_initial(mut self, initial: DensityMatrix) -> Self {
        self.initial = initial;
        self
    }

    pub fn evolve(&self, t: f64) -> Result<EvolvedState> {
        let u = two_qubit_drives(&self.qubit1, &self.qubit2, t);
        let unnormalized = u * *self.initial.matrix() * u.adjoint();
        let norm = unnormalized.trace().re;
        if !(norm > NORM_UNDERFLOW) || !norm.is_finite() {
            return Err(Error::DegenerateNorm { t, norm });
        }
        Ok(EvolvedState {
            state: DensityMatrix::from_positive(&unnormalized),
            norm,
        })
    }

    pub fn concurrence_at(&self, t: f64) -> Result<f64> {
        Ok(concurrence(&self.evolve(t)?.state)?.value)
    }
}

/// `ρ(t) = UρU† / Tr[UρU†]` with `U = U₁(t) ⊗ U₂(t)`.
pub fn evolve_state(
    initial: &DensityMatrix,
    p1: impl Into<QubitDrive>,
    p2: impl Into<QubitDrive>,
    t: f64,
) -> Result<DensityMatrix> {
    Ok(Evolution::new(p1, p2)
        .with_initial(*initial)
        .evolve(t)?
        .state)
}

/// A sampled run: time grid, evolution and whether to keep full states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolutionSpec {
    pub evolution: Evolution,
    pub t_max: f64,
    pub dt: f64,
    pub keep_states: bool,
}

/// Default step for trajectory grids.
pub const DEFAULT_DT: f64 = 0.01;

impl EvolutionSpec {
    /// Bell-state run of two APT/PT qubits on the default grid up to `t_max`.
    pub fn new(p1: AptParams, p2: impl Into<QubitDrive>, t_max: f64) -> Self {
        Self {
            evolution: Evolution::new(p1, p2),
            t_max,
            dt: DEFAULT_DT,
            keep_states: false,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_initial(mut self, initial: DensityMatrix) -> Self {
        self.evolution.initial = initial;
        self
    }

    pub fn keep_states(mut self, keep: bool) -> Self {
        self.keep_states = keep;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: self.dt,
                reason: "must be finite and > 0",
            });
        }
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(Error::InvalidParameter {
                name: "t_max",
                value: self.t_max,
                reason: "must be finite and >= 0",
            });
        }
        Ok(())
    }

    /// `{0, dt, 2dt, …}` up to and including `t_max` (with a 1e-9 step slack).
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let n = (self.t_max / self.dt + 1e-9).floor() as usize + 1;
        (0..n).map(move |k| k as f64 * self.dt)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub concurrence: Vec<f64>,
    /// `Tr[U(t)ρ(0)U†(t)]` before renormalization.
    pub unnormalized_norm: Vec<f64>,
    pub states: Option<Vec<DensityMatrix>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn min_concurrence(&self) -> f64 {
        self.concurrence.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_concurrence(&self) -> f64 {
        self.concurrence
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// First sampled time with concurrence strictly below `threshold`.
    pub fn first_time_below(&self, threshold: f64) -> Option<f64> {
        self.concurrence
            .iter()
            .position(|&c| c < threshold)
            .map(|k| self.times[k])
    }
}

/// Samples the evolution on the spec's grid.
pub fn run(spec: &EvolutionSpec) -> Result<Trajectory> {
    spec.validate()?;
    let mut out = Trajectory {
        states: spec.keep_states.then(Vec::new),
        ..Trajectory::default()
    };
    for t in spec.times() {
        let evolved = spec.evolution.evolve(t)?;
        let c = concurrence(&evolved.state)?.value;
        out.times.push(t);
        out.concurrence.push(c);
        out.unnormalized_norm.push(evolved.norm);
        if let Some(states) = out.states.as_mut() {
            states.push(evolved.state);
        }
    }
    Ok(out)
}
