//! Signal–probe evolution through the PBS / cross-Kerr / phase-gate network.
//!
//! Every branch leaves the probe in a coherent state `|α e^{iβ}⟩` whose phase
//! depends only on the number `w` of V photons. An H photon imprints `θ`, a V
//! photon `2θ`, and the compensating gate removes `3nθ/2`, so the net probe
//! phase of class `w` is `(n - w)θ + 2wθ - 3nθ/2 = (w - n/2)θ`. The probe is
//! therefore carried as one real phase per weight class.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{SimError, SimResult};
use crate::state::{weight_probabilities, SignalState, SYMMETRIC_CAP};

/// Largest Kerr phase accepted, in radians.
pub const THETA_MAX: f64 = 0.3;

/// Photon count, probe amplitude and per-photon Kerr phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    n: usize,
    alpha: f64,
    theta: f64,
}

impl CircuitParams {
    /// Validates `n >= 2`, `α > 0`, `0 < θ <= 0.3` and `nθ <= π/2`.
    ///
    /// The last bound keeps the peak centres `2α cos(mθ)` strictly decreasing in
    /// `m`, which the midpoint decision rule relies on.
    pub fn new(n: usize, alpha: f64, theta: f64) -> SimResult<Self> {
        if n < 2 {
            return Err(SimError::InvalidParams(format!("n = {n}, need n >= 2")));
        }
        if n > SYMMETRIC_CAP {
            return Err(SimError::Capacity {
                n,
                cap: SYMMETRIC_CAP,
                backend: "symmetric",
            });
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(SimError::InvalidParams(format!(
                "alpha = {alpha}, need a finite alpha > 0"
            )));
        }
        if !(theta > 0.0 && theta <= THETA_MAX) {
            return Err(SimError::InvalidParams(format!(
                "theta = {theta}, need 0 < theta <= {THETA_MAX}"
            )));
        }
        if n as f64 * theta > std::f64::consts::FRAC_PI_2 {
            return Err(SimError::InvalidParams(format!(
                "n * theta = {} exceeds pi/2; peak ordering is lost",
                n as f64 * theta
            )));
        }
        Ok(Self { n, alpha, theta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Smallest admissible twice-index: 0 for even `n`, 1 for odd `n`.
    pub fn t_min(&self) -> usize {
        self.n % 2
    }

    /// All outcome twice-indices `t_min, t_min + 2, …, n`.
    pub fn outcomes(&self) -> impl Iterator<Item = usize> + Clone {
        (self.t_min()..=self.n).step_by(2)
    }

    /// Homodyne peak of the classes with `|w - n/2| = m`, `m = t / 2`: `2α cos(mθ)`.
    pub fn peak(&self, t: usize) -> f64 {
        2.0 * self.alpha * (t as f64 * 0.5 * self.theta).cos()
    }
}

/// One branch of the single-mode Kerr interaction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KerrBranch {
    /// Signal photon number of the branch (0 or 1).
    pub photons: u8,
    pub amplitude: C64,
    /// Phase picked up by the probe, `|α⟩ → |α e^{i·probe_phase}⟩`.
    pub probe_phase: f64,
}

/// `c0|0⟩|α⟩ + c1|1⟩|α⟩ → c0|0⟩|α⟩ + c1|1⟩|α e^{iθ}⟩`.
///
/// Branches with zero amplitude are dropped. The probe amplitude is unchanged
/// by the interaction and is not repeated in the output.
pub fn kerr_single_mode(c0: C64, c1: C64, theta: f64) -> SimResult<Vec<KerrBranch>> {
    let norm_sq = c0.norm_sqr() + c1.norm_sqr();
    if (norm_sq - 1.0).abs() > crate::state::NORM_TOLERANCE {
        return Err(SimError::Normalization {
            norm_sq,
            tolerance: crate::state::NORM_TOLERANCE,
        });
    }
    Ok([(0u8, c0, 0.0), (1u8, c1, theta)]
        .into_iter()
        .filter(|(_, a, _)| a.norm_sqr() > 0.0)
        .map(|(photons, amplitude, probe_phase)| KerrBranch {
            photons,
            amplitude,
            probe_phase,
        })
        .collect())
}

/// Net probe phase `(w - n/2)θ` of weight class `w`.
pub fn probe_phase(params: &CircuitParams, w: usize) -> SimResult<f64> {
    if w > params.n {
        return Err(SimError::Index {
            what: "weight",
            value: w,
            min: 0,
            max: params.n,
        });
    }
    Ok(signed_half_steps(params.n, w) as f64 * 0.5 * params.theta)
}

/// `2w - n`, the probe phase in units of `θ/2`.
pub(crate) fn signed_half_steps(n: usize, w: usize) -> i64 {
    2 * w as i64 - n as i64
}

/// A populated weight class of the joint state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeClass {
    pub weight: usize,
    /// `β_w = (w - n/2)θ`.
    pub probe_phase: f64,
    /// `P_w`, the squared norm of the signal amplitudes in this class.
    pub probability: f64,
}

impl ProbeClass {
    /// Twice-index `|2w - n|` of the outcome this class belongs to.
    pub fn outcome(&self, n: usize) -> usize {
        signed_half_steps(n, self.weight).unsigned_abs() as usize
    }
}

/// Signal state with each populated weight class tagged by its probe phase.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    params: CircuitParams,
    signal: SignalState,
    classes: Vec<ProbeClass>,
}

impl JointState {
    pub fn params(&self) -> &CircuitParams {
        &self.params
    }

    /// Signal amplitudes, unchanged by the evolution.
    pub fn signal(&self) -> &SignalState {
        &self.signal
    }

    /// Populated classes in increasing weight order.
    pub fn classes(&self) -> &[ProbeClass] {
        &self.classes
    }

    pub fn total_probability(&self) -> f64 {
        self.classes
            .iter()
            .map(|c| c.probability)
            .collect::<crate::special::NeumaierSum>()
            .value()
    }
}

/// Runs the Kerr network on a normalized input.
pub fn kerr_evolve(params: &CircuitParams, input: &SignalState) -> SimResult<JointState> {
    if input.n() != params.n {
        return Err(SimError::Dimension {
            expected: params.n,
            found: input.n(),
        });
    }
    let dist = weight_probabilities(input)?;
    let classes = dist
        .probabilities
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(w, &probability)| ProbeClass {
            weight: w,
            probe_phase: signed_half_steps(params.n, w) as f64 * 0.5 * params.theta,
            probability,
        })
        .collect();
    Ok(JointState {
        params: *params,
        signal: input.clone(),
        classes,
    })
}
