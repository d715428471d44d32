//! Closed-form error probabilities, outcome probabilities, Monte Carlo runs and
//! parameter sweeps.
//!
//! A weight class is misread when its Gaussian crosses the midpoint towards a
//! neighbour, i.e. with probability `P(Z > gap/2) = erfc(gap/(2√2))/2`. The
//! per-outcome values `ε_k` use the exact gap; `ε_max` uses the small-angle gap
//! `αθ²`. The two are computed independently so that `ε_k <= ε_max` can be
//! checked rather than assumed.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{kerr_evolve, CircuitParams, JointState};
use crate::error::{SimError, SimResult};
use crate::feedforward::{apply_correction, ideal_output};
use crate::homodyne::{classify, collapse, gap, outcome_interval, HomodyneSampler};
use crate::input::InputPreset;
use crate::rng::trial_rng;
use crate::special::{normal_interval_mass, NeumaierSum};
use crate::state::{check_twice_index, fidelity, Backend, SignalState};

/// `ε_k = erfc(gap_k / (2√2)) / 2` with the exact peak separation.
pub fn error_prob(params: &CircuitParams, t: usize) -> SimResult<f64> {
    Ok(0.5 * libm::erfc(gap(params, t)? / (2.0 * SQRT_2)))
}

/// `ε_max = erfc(αθ² / (2√2)) / 2`.
pub fn max_error_prob(params: &CircuitParams) -> f64 {
    let g = params.alpha() * params.theta() * params.theta();
    0.5 * libm::erfc(g / (2.0 * SQRT_2))
}

/// Small-angle separation `(2k - 1)αθ²`, `k = t/2`.
pub fn gap_approx(params: &CircuitParams, t: usize) -> SimResult<f64> {
    // same admissible range as the exact gap
    gap(params, t)?;
    Ok((t as f64 - 1.0) * params.alpha() * params.theta() * params.theta())
}

/// Probability that the homodyne value lands in the interval of each outcome,
/// in increasing `t` order.
pub fn outcome_probabilities(joint: &JointState) -> Vec<(usize, f64)> {
    let p = joint.params();
    p.outcomes()
        .map(|t| {
            let (lo, hi) = outcome_interval(p, t).expect("outcome from params");
            let mass: NeumaierSum = joint
                .classes()
                .iter()
                .map(|c| {
                    let centre = p.peak(c.outcome(p.n()));
                    c.probability * normal_interval_mass(lo - centre, hi - centre)
                })
                .collect();
            (t, mass.value())
        })
        .collect()
}

/// Probability of outcome `t` for `input`.
pub fn outcome_probability(
    params: &CircuitParams,
    input: &SignalState,
    t: usize,
) -> SimResult<f64> {
    check_twice_index(params.n(), t)?;
    let joint = kerr_evolve(params, input)?;
    Ok(outcome_probabilities(&joint)
        .into_iter()
        .find(|(s, _)| *s == t)
        .map(|(_, p)| p)
        .unwrap_or(0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub t: usize,
    pub gap_exact: f64,
    pub gap_approx: f64,
    pub epsilon_k: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbability {
    pub t: usize,
    pub probability: f64,
}

/// Error analysis for one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub n: usize,
    pub alpha: f64,
    pub theta: f64,
    /// One row per midpoint, `t = t_min + 2, …, n`.
    pub per_outcome: Vec<ErrorRow>,
    pub outcome_probabilities: Vec<OutcomeProbability>,
    /// `erfc(αθ²/(2√2))/2`.
    pub epsilon_max: f64,
    /// `ε` at the smallest exact gap for this parity (`k = 1` or `k = 3/2`).
    pub epsilon_smallest_gap: f64,
}

pub fn error_report(params: &CircuitParams, input: &SignalState) -> SimResult<ErrorReport> {
    let joint = kerr_evolve(params, input)?;
    let per_outcome = params
        .outcomes()
        .skip(1)
        .map(|t| {
            Ok(ErrorRow {
                t,
                gap_exact: gap(params, t)?,
                gap_approx: gap_approx(params, t)?,
                epsilon_k: error_prob(params, t)?,
            })
        })
        .collect::<SimResult<Vec<_>>>()?;
    let epsilon_smallest_gap = per_outcome.iter().map(|r| r.epsilon_k).fold(0.0, f64::max);
    Ok(ErrorReport {
        n: params.n(),
        alpha: params.alpha(),
        theta: params.theta(),
        per_outcome,
        outcome_probabilities: outcome_probabilities(&joint)
            .into_iter()
            .map(|(t, probability)| OutcomeProbability { t, probability })
            .collect(),
        epsilon_max: max_error_prob(params),
        epsilon_smallest_gap,
    })
}

/// Aggregate of a Monte Carlo run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub trials: u64,
    pub seed: u64,
    /// Keyed by outcome twice-index; every outcome is present, possibly with 0.
    pub per_outcome_counts: BTreeMap<usize, u64>,
    pub misclassified: u64,
    pub empirical_misclassification: f64,
    /// `3·sqrt(p̂(1 - p̂)/N)`.
    pub confidence_radius: f64,
    pub mean_output_fidelity: f64,
}

/// What happened in a single trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialOutcome {
    pub weight: usize,
    pub x: f64,
    pub t: usize,
    pub misclassified: bool,
    pub fidelity: f64,
}

/// Joint state, sampler and heralded targets prepared once for many trials.
pub struct MonteCarloRunner {
    params: CircuitParams,
    input: SignalState,
    joint: JointState,
    sampler: HomodyneSampler,
    targets: Vec<OnceLock<Option<SignalState>>>,
}

const CHUNK: u64 = 1024;

impl MonteCarloRunner {
    pub fn new(params: &CircuitParams, input: &SignalState) -> SimResult<Self> {
        let joint = kerr_evolve(params, input)?;
        let sampler = HomodyneSampler::new(&joint);
        Ok(Self {
            params: *params,
            input: input.clone(),
            joint,
            sampler,
            targets: (0..=params.n()).map(|_| OnceLock::new()).collect(),
        })
    }

    fn target(&self, t: usize) -> SimResult<Option<&SignalState>> {
        if let Some(v) = self.targets[t].get() {
            return Ok(v.as_ref());
        }
        let built = match ideal_output(&self.input, &self.params, t) {
            Ok(s) => Some(s),
            Err(SimError::EmptyOutcome { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(self.targets[t].get_or_init(|| built).as_ref())
    }

    /// Sample, classify, collapse, correct, score.
    pub fn trial(&self, seed: u64, index: u64) -> SimResult<TrialOutcome> {
        let mut rng = trial_rng(seed, index);
        let draw = self.sampler.sample(&mut rng);
        let n = self.params.n();
        let t = classify(&self.params, draw.x);
        let conditional = collapse(&self.joint, draw.x)?;
        let corrected = apply_correction(&conditional, &self.params, t, draw.x)?;
        let fidelity = match self.target(t)? {
            Some(target) => fidelity(&corrected.state, target)?,
            None => 0.0,
        };
        let true_t = (2 * draw.weight).abs_diff(n);
        Ok(TrialOutcome {
            weight: draw.weight,
            x: draw.x,
            t,
            misclassified: true_t != t,
            fidelity,
        })
    }

    /// Runs `trials` trials in parallel; the report is identical for any thread count.
    pub fn run(&self, trials: u64, seed: u64) -> SimResult<MonteCarloReport> {
        if trials == 0 {
            return Err(SimError::InvalidParams("trials must be at least 1".into()));
        }
        let n = self.params.n();
        let chunks = trials.div_ceil(CHUNK);
        let partials = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut counts = vec![0u64; n + 1];
                let mut wrong = 0u64;
                let mut fid = NeumaierSum::new();
                for i in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                    let o = self.trial(seed, i)?;
                    counts[o.t] += 1;
                    wrong += o.misclassified as u64;
                    fid.add(o.fidelity);
                }
                Ok((counts, wrong, fid))
            })
            .collect::<SimResult<Vec<_>>>()?;

        let mut counts = vec![0u64; n + 1];
        let mut misclassified = 0u64;
        let mut fid = NeumaierSum::new();
        for (c, w, f) in &partials {
            for (acc, v) in counts.iter_mut().zip(c) {
                *acc += v;
            }
            misclassified += w;
            fid.merge(f);
        }
        let rate = misclassified as f64 / trials as f64;
        Ok(MonteCarloReport {
            trials,
            seed,
            per_outcome_counts: self.params.outcomes().map(|t| (t, counts[t])).collect(),
            misclassified,
            empirical_misclassification: rate,
            confidence_radius: 3.0 * (rate * (1.0 - rate) / trials as f64).sqrt(),
            mean_output_fidelity: fid.value() / trials as f64,
        })
    }
}

/// Monte Carlo estimate of outcome frequencies, misclassification and output fidelity.
pub fn run_monte_carlo(
    params: &CircuitParams,
    input: &SignalState,
    trials: u64,
    seed: u64,
) -> SimResult<MonteCarloReport> {
    MonteCarloRunner::new(params, input)?.run(trials, seed)
}

/// One `(n, α, θ)` grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub alpha: f64,
    pub theta: f64,
}

/// One output row of a sweep. Invalid points carry `t = None` and a reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub alpha: f64,
    pub theta: f64,
    pub t: Option<usize>,
    pub gap_exact: Option<f64>,
    pub gap_approx: Option<f64>,
    pub epsilon_k: Option<f64>,
    pub epsilon_max: Option<f64>,
    pub outcome_prob: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invalid: Option<String>,
}

fn sweep_point(
    point: &SweepPoint,
    input: &InputPreset,
    backend: Backend,
) -> SimResult<Vec<SweepRow>> {
    let params = CircuitParams::new(point.n, point.alpha, point.theta)?;
    let state = input.build(point.n, backend)?;
    let report = error_report(&params, &state)?;
    Ok(report
        .outcome_probabilities
        .iter()
        .map(|op| {
            let row = report.per_outcome.iter().find(|r| r.t == op.t);
            SweepRow {
                n: point.n,
                alpha: point.alpha,
                theta: point.theta,
                t: Some(op.t),
                gap_exact: row.map(|r| r.gap_exact),
                gap_approx: row.map(|r| r.gap_approx),
                epsilon_k: row.map(|r| r.epsilon_k),
                epsilon_max: Some(report.epsilon_max),
                outcome_prob: Some(op.probability),
                invalid: None,
            }
        })
        .collect())
}

/// Tabulates every grid point in order; points violating a cap yield a single
/// invalid row and the sweep continues.
pub fn sweep(points: &[SweepPoint], input: &InputPreset, backend: Backend) -> Vec<SweepRow> {
    points
        .iter()
        .flat_map(|pt| match sweep_point(pt, input, backend) {
            Ok(rows) => rows,
            Err(e) => vec![SweepRow {
                n: pt.n,
                alpha: pt.alpha,
                theta: pt.theta,
                t: None,
                gap_exact: None,
                gap_approx: None,
                epsilon_k: None,
                epsilon_max: None,
                outcome_prob: None,
                invalid: Some(e.to_string()),
            }],
        })
        .collect()
}

/// Column header shared by sweep tables and the CSV form of an error report.
pub const SWEEP_CSV_HEADER: [&str; 9] = [
    "n",
    "alpha",
    "theta",
    "t",
    "gap_exact",
    "gap_approx",
    "epsilon_k",
    "epsilon_max",
    "outcome_prob",
];

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Sweep rows as CSV. Invalid rows put `invalid` in the `t` column and leave
/// the numeric columns empty.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.alpha.to_string(),
            r.theta.to_string(),
            r.t.map(|t| t.to_string())
                .unwrap_or_else(|| "invalid".into()),
            cell(r.gap_exact),
            cell(r.gap_approx),
            cell(r.epsilon_k),
            cell(r.epsilon_max),
            cell(r.outcome_prob),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// Error report in the sweep CSV layout (one row per outcome).
pub fn error_report_csv(report: &ErrorReport) -> String {
    let rows: Vec<SweepRow> = report
        .outcome_probabilities
        .iter()
        .map(|op| {
            let row = report.per_outcome.iter().find(|r| r.t == op.t);
            SweepRow {
                n: report.n,
                alpha: report.alpha,
                theta: report.theta,
                t: Some(op.t),
                gap_exact: row.map(|r| r.gap_exact),
                gap_approx: row.map(|r| r.gap_approx),
                epsilon_k: row.map(|r| r.epsilon_k),
                epsilon_max: Some(report.epsilon_max),
                outcome_prob: Some(op.probability),
                invalid: None,
            }
        })
        .collect();
    sweep_csv(&rows)
}
