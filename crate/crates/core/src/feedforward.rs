//! Classically conditioned phase correction and heralded target states.
//!
//! After outcome `t = 2k >= 1` the two surviving classes `n/2 ∓ k` carry
//! `e^{∓iϕ_k(x)}`. Shifting every V photon by `-φ_k(x)`, with
//! `φ_k(x) = ϕ_k(x)/k mod 2π`, moves the heavier class by `-2kφ_k = -2ϕ_k`
//! relative to the lighter one and cancels the offset up to a global phase.

use num_complex::Complex64 as C64;

use crate::circuit::{kerr_evolve, CircuitParams};
use crate::error::{SimError, SimResult};
use crate::homodyne::{classify, collapse, reduce_angle, unreduced_phase_phi};
use crate::state::{check_twice_index, fidelity, outcome_weights, SignalState};

/// Corrected signal state for one heralded outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectedOutput {
    pub state: SignalState,
    pub t_outcome: usize,
    /// Phase factored out of the state after correction (diagnostic only).
    pub global_phase_removed: f64,
}

/// Per-V-photon correction magnitude `φ_k(x) = ϕ_k(x)/k mod 2π`, `k = t/2`.
pub fn correction_phase(params: &CircuitParams, t: usize, x: f64) -> SimResult<f64> {
    check_twice_index(params.n(), t)?;
    if t == 0 {
        return Err(SimError::Index {
            what: "correction twice-index",
            value: 0,
            min: 1,
            max: params.n(),
        });
    }
    // divide before reducing: (ϕ mod 2π)/k and (ϕ/k) mod 2π differ
    Ok(reduce_angle(
        unreduced_phase_phi(params, t, x) * 2.0 / t as f64,
    ))
}

/// Applies the feed-forward for outcome `t`, which must be `classify(params, x)`.
pub fn apply_correction(
    state: &SignalState,
    params: &CircuitParams,
    t: usize,
    x: f64,
) -> SimResult<CorrectedOutput> {
    let classified = classify(params, x);
    if classified != t {
        return Err(SimError::Misrouted {
            requested: t,
            classified,
        });
    }
    apply_correction_unchecked(state, params, t, x)
}

/// Applies the correction for `t` whatever `x` classifies to.
///
/// Meant for measuring the cost of a wrong branch; regular pipelines go through
/// [`apply_correction`].
pub fn apply_correction_unchecked(
    state: &SignalState,
    params: &CircuitParams,
    t: usize,
    x: f64,
) -> SimResult<CorrectedOutput> {
    if state.n() != params.n() {
        return Err(SimError::Dimension {
            expected: params.n(),
            found: state.n(),
        });
    }
    check_twice_index(params.n(), t)?;
    let corrected = if t == 0 {
        state.clone()
    } else {
        let per_photon = correction_phase(params, t, x)?;
        let factors: Vec<C64> = (0..=params.n())
            .map(|w| C64::from_polar(1.0, -(w as f64) * per_photon))
            .collect();
        state.scale_by_weight(&factors)?
    };
    let reference = corrected.dominant_basis_amplitude();
    let global_phase_removed = if reference.norm_sqr() > 0.0 {
        reference.arg()
    } else {
        0.0
    };
    let state = corrected.scale(C64::from_polar(1.0, -global_phase_removed));
    Ok(CorrectedOutput {
        state,
        t_outcome: t,
        global_phase_removed,
    })
}

/// Input restricted to the weight classes heralded by `t`, renormalized.
pub fn ideal_output(
    input: &SignalState,
    params: &CircuitParams,
    t: usize,
) -> SimResult<SignalState> {
    if input.n() != params.n() {
        return Err(SimError::Dimension {
            expected: params.n(),
            found: input.n(),
        });
    }
    let (lo, hi) = outcome_weights(params.n(), t)?;
    let mask: Vec<C64> = (0..=params.n())
        .map(|w| {
            if w == lo || w == hi {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    input
        .scale_by_weight(&mask)?
        .normalize()
        .map_err(|_| SimError::EmptyOutcome { t })
}

/// Fidelity of a corrected state to the target heralded by `t`.
///
/// Returns 0 when the input has no support on the heralded classes: the
/// delivered state then lies entirely outside the announced subspace.
pub fn heralded_fidelity(
    input: &SignalState,
    params: &CircuitParams,
    t: usize,
    corrected: &SignalState,
) -> SimResult<f64> {
    match ideal_output(input, params, t) {
        Ok(target) => fidelity(corrected, &target),
        Err(SimError::EmptyOutcome { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// End-to-end fidelity for a given homodyne value `x`.
pub fn output_fidelity(params: &CircuitParams, input: &SignalState, x: f64) -> SimResult<f64> {
    let joint = kerr_evolve(params, input)?;
    let conditional = collapse(&joint, x)?;
    let t = classify(params, x);
    let corrected = apply_correction(&conditional, params, t, x)?;
    heralded_fidelity(input, params, t, &corrected.state)
}

/// Relative phase `arg(a_hi / a_lo)` between two single-bitstring amplitudes of
/// the heralded classes, compared against the same ratio in `reference`.
pub fn residual_relative_phase(
    corrected: &SignalState,
    reference: &SignalState,
    params: &CircuitParams,
    t: usize,
) -> SimResult<f64> {
    let (lo, hi) = outcome_weights(params.n(), t)?;
    let pick = |s: &SignalState, w: usize| -> SimResult<C64> {
        Ok(match s {
            SignalState::Symmetric(s) => s.weight_amplitudes()[w],
            // lowest bitstring of weight w: the w lowest bits set
            SignalState::Dense(d) => d.amplitudes()[(1usize << w) - 1],
        })
    };
    let got = pick(corrected, hi)? / pick(corrected, lo)?;
    let want = pick(reference, hi)? / pick(reference, lo)?;
    Ok((got / want).arg().abs())
}
