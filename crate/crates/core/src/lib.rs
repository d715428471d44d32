//! Simulation of multiphoton entangled-state generation with weak cross-Kerr
//! nonlinearities.
//!
//! `n` single photons, each in an arbitrary polarization state, interact with a
//! coherent probe through small Kerr phase shifts. An X homodyne measurement of
//! the probe projects the photons onto a pair of Dicke classes
//! `{n/2 - k, n/2 + k}`, and a classically controlled phase shift removes the
//! measurement-dependent relative phase. For uniform inputs the heralded
//! outputs are cat-like states, with the GHZ state at `k = n/2`.
//!
//! Module map:
//! - [`state`]: dense and permutation-symmetric signal states, target states, fidelity
//! - [`circuit`]: Kerr network and probe phase ladder
//! - [`homodyne`]: quadrature statistics, collapse, midpoint classifier
//! - [`feedforward`]: phase correction and heralded targets
//! - [`analysis`]: error probabilities, Monte Carlo, sweeps
//! - [`cli`]: configuration and report emission for the `kerrsim` binary

pub mod analysis;
pub mod circuit;
pub mod cli;
pub mod error;
pub mod feedforward;
pub mod homodyne;
pub mod input;
pub mod rng;
pub mod special;
pub mod state;

pub use circuit::{kerr_evolve, CircuitParams, JointState};
pub use error::{SimError, SimResult};
pub use state::{Backend, DenseSignalState, SignalState, SymmetricSignalState};
