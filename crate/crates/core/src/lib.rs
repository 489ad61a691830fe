//! Two-qubit entanglement dynamics under anti-parity-time (APT) symmetric
//! non-Hermitian Hamiltonians.
//!
//! Each qubit evolves under `H = γ(iσx + aσz)` (or the PT counterpart
//! `γ(σx − iaσz)`), the pair evolves under `U₁(t) ⊗ U₂(t)`, and the state is
//! renormalized by the trace after every application of the nonunitary
//! propagator. On top of that sit the Wootters concurrence, a Jones-calculus
//! decomposition of each propagator into wave plates and a beam-displacer loss
//! element, and a 16-basis tomography chain with maximum-likelihood
//! reconstruction.
//!
//! The crate is `no_std` and only needs `alloc` for trajectories and count
//! records.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod dynamics;
pub mod entanglement;
mod error;
pub mod linalg;
pub mod model;
pub mod optics;
pub mod propagator;
pub mod tomography;

pub use error::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;
