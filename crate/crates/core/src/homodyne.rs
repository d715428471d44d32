//! X homodyne measurement of the probe.
//!
//! A probe in `|α e^{iβ}⟩` yields a quadrature value with amplitude
//! `f(x, 2α cos β) = (2π)^{-1/4} exp(-(x - 2α cos β)²/4)`, so each weight class
//! contributes a unit-variance Gaussian centred at `2α cos β_w`. Measuring `x`
//! multiplies class `w` by that amplitude and by the phase
//! `exp(±i ϕ_m(x))`, `ϕ_m(x) = α sin(mθ)[x - 2α cos(mθ)] mod 2π`, where
//! `m = |w - n/2|` and the sign is that of `w - n/2`.
//!
//! Outcomes are labelled by the twice-index `t = 2m`. Neighbouring peaks are
//! separated by midpoints `x_m(t)`; the interval of `t` is `(x_m(t + 2), x_m(t)]`
//! with the outer intervals unbounded.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::circuit::{signed_half_steps, CircuitParams, JointState};
use crate::error::{SimError, SimResult};
use crate::state::{check_twice_index, SignalState};

/// Natural log of the smallest post-collapse norm treated as a possible outcome.
const LN_MIN_NORM: f64 = -690.7755278982137; // ln(1e-300)

/// `(2π)^{-1/4} exp(-(x - center)²/4)`; its square is a unit-variance normal density.
pub fn gaussian_amplitude(x: f64, center: f64) -> f64 {
    let d = x - center;
    (2.0 * PI).powf(-0.25) * (-0.25 * d * d).exp()
}

/// `ϕ_{t/2}(x) = α sin(tθ/2)[x - 2α cos(tθ/2)]` reduced to `[0, 2π)`.
pub fn phase_phi(params: &CircuitParams, t: usize, x: f64) -> f64 {
    reduce_angle(unreduced_phase_phi(params, t, x))
}

pub(crate) fn unreduced_phase_phi(params: &CircuitParams, t: usize, x: f64) -> f64 {
    let angle = t as f64 * 0.5 * params.theta();
    params.alpha() * angle.sin() * (x - 2.0 * params.alpha() * angle.cos())
}

pub(crate) fn reduce_angle(raw: f64) -> f64 {
    let r = raw.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Natural log of the homodyne density `p(x) = Σ_w P_w N(x; 2α cos β_w, 1)`.
pub fn log_marginal_pdf(joint: &JointState, x: f64) -> f64 {
    let p = joint.params();
    let n = p.n();
    let logs: Vec<f64> = joint
        .classes()
        .iter()
        .map(|c| {
            let d = x - p.peak(c.outcome(n));
            c.probability.ln() - 0.5 * d * d
        })
        .collect();
    log_sum_exp(&logs) - 0.5 * (2.0 * PI).ln()
}

/// Homodyne density of the probe quadrature. There are no cross terms because
/// distinct weight classes are orthogonal in the signal register.
pub fn marginal_pdf(joint: &JointState, x: f64) -> f64 {
    log_marginal_pdf(joint, x).exp()
}

fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln()
}

/// One homodyne draw together with the weight class that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomodyneSample {
    pub weight: usize,
    pub x: f64,
}

/// Draws from the homodyne distribution of a fixed joint state.
///
/// Holds the class CDF so repeated draws cost `O(log n)`.
#[derive(Clone, Debug)]
pub struct HomodyneSampler {
    cdf: Vec<f64>,
    weights: Vec<usize>,
    centers: Vec<f64>,
}

impl HomodyneSampler {
    pub fn new(joint: &JointState) -> Self {
        let p = joint.params();
        let mut acc = 0.0;
        let mut cdf = Vec::with_capacity(joint.classes().len());
        for c in joint.classes() {
            acc += c.probability;
            cdf.push(acc);
        }
        let total = acc;
        for v in &mut cdf {
            *v /= total;
        }
        Self {
            cdf,
            weights: joint.classes().iter().map(|c| c.weight).collect(),
            centers: joint
                .classes()
                .iter()
                .map(|c| p.peak(c.outcome(p.n())))
                .collect(),
        }
    }

    /// Picks class `w` with probability `P_w`, then `x ~ N(2α cos β_w, 1)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> HomodyneSample {
        let u: f64 = rng.random();
        let idx = self
            .cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len() - 1);
        let z: f64 = rng.sample(StandardNormal);
        HomodyneSample {
            weight: self.weights[idx],
            x: self.centers[idx] + z,
        }
    }
}

/// Single homodyne draw (with its generating class).
pub fn sample_outcome<R: Rng + ?Sized>(joint: &JointState, rng: &mut R) -> HomodyneSample {
    HomodyneSampler::new(joint).sample(rng)
}

/// Single homodyne value.
pub fn sample_x<R: Rng + ?Sized>(joint: &JointState, rng: &mut R) -> f64 {
    sample_outcome(joint, rng).x
}

/// Conditional signal state after observing `x`, renormalized, before feed-forward.
pub fn collapse(joint: &JointState, x: f64) -> SimResult<SignalState> {
    let p = joint.params();
    let n = p.n();
    // log of |f(x, peak_w)| without the (2π)^{-1/4} prefactor
    let mut log_amp = vec![f64::NEG_INFINITY; n + 1];
    for c in joint.classes() {
        let d = x - p.peak(c.outcome(n));
        log_amp[c.weight] = -0.25 * d * d;
    }
    let max = log_amp.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut scaled_norm_sq = 0.0;
    for c in joint.classes() {
        scaled_norm_sq += c.probability * (2.0 * (log_amp[c.weight] - max)).exp();
    }
    let log_norm = -0.25 * (2.0 * PI).ln() + max + 0.5 * scaled_norm_sq.ln();
    if log_norm.is_nan() || log_norm < LN_MIN_NORM {
        return Err(SimError::ImpossibleOutcome { x });
    }

    let inv = scaled_norm_sq.sqrt().recip();
    let factors: Vec<C64> = (0..=n)
        .map(|w| {
            if log_amp[w] == f64::NEG_INFINITY {
                return C64::new(0.0, 0.0);
            }
            let s = signed_half_steps(n, w);
            let phi = phase_phi(p, s.unsigned_abs() as usize, x);
            let phase = if s < 0 { -phi } else { phi };
            C64::from_polar((log_amp[w] - max).exp() * inv, phase)
        })
        .collect();
    joint.signal().scale_by_weight(&factors)?.normalize()
}

fn check_boundary_index(params: &CircuitParams, t: usize) -> SimResult<()> {
    check_twice_index(params.n(), t)?;
    let lo = params.t_min() + 2;
    if t < lo {
        return Err(SimError::Index {
            what: "midpoint twice-index",
            value: t,
            min: lo,
            max: params.n(),
        });
    }
    Ok(())
}

/// Midpoint between the peaks of outcomes `t - 2` and `t`:
/// `x_m = 2α cos(θ/2) cos((k - 1/2)θ)`, `k = t/2`.
pub fn midpoint(params: &CircuitParams, t: usize) -> SimResult<f64> {
    check_boundary_index(params, t)?;
    Ok(midpoint_unchecked(params, t))
}

fn midpoint_unchecked(params: &CircuitParams, t: usize) -> f64 {
    let theta = params.theta();
    2.0 * params.alpha() * (0.5 * theta).cos() * ((t as f64 - 1.0) * 0.5 * theta).cos()
}

/// Peak separation `2α[cos((k-1)θ) - cos(kθ)]`, evaluated as
/// `4α sin((k - 1/2)θ) sin(θ/2)` to avoid cancellation.
pub fn gap(params: &CircuitParams, t: usize) -> SimResult<f64> {
    check_boundary_index(params, t)?;
    let theta = params.theta();
    Ok(4.0 * params.alpha() * ((t as f64 - 1.0) * 0.5 * theta).sin() * (0.5 * theta).sin())
}

/// Outcome twice-index for homodyne value `x`.
///
/// A value exactly on a midpoint goes to the larger-`t` (lower-`x`) interval.
pub fn classify(params: &CircuitParams, x: f64) -> usize {
    let t_min = params.t_min();
    // midpoints for t = t_min + 2, t_min + 4, …, n decrease with t; count those >= x
    let count = (params.n() - t_min) / 2;
    let (mut lo, mut hi) = (0usize, count);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if x <= midpoint_unchecked(params, t_min + 2 + 2 * mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    t_min + 2 * lo
}

/// Half-open interval `(lower, upper]` of `x` values classified as `t`.
pub fn outcome_interval(params: &CircuitParams, t: usize) -> SimResult<(f64, f64)> {
    check_twice_index(params.n(), t)?;
    let upper = if t == params.t_min() {
        f64::INFINITY
    } else {
        midpoint_unchecked(params, t)
    };
    let lower = if t == params.n() {
        f64::NEG_INFINITY
    } else {
        midpoint_unchecked(params, t + 2)
    };
    Ok((lower, upper))
}

/// Result of one homodyne measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub x: f64,
    pub t_outcome: usize,
    /// Post-collapse, pre-correction signal state.
    pub conditional: SignalState,
}

/// Measures a homodyne value `x` given by the caller.
pub fn measure_at(joint: &JointState, x: f64) -> SimResult<MeasurementRecord> {
    Ok(MeasurementRecord {
        x,
        t_outcome: classify(joint.params(), x),
        conditional: collapse(joint, x)?,
    })
}

/// Samples, classifies and collapses.
pub fn measure<R: Rng + ?Sized>(joint: &JointState, rng: &mut R) -> SimResult<MeasurementRecord> {
    measure_at(joint, sample_x(joint, rng))
}
