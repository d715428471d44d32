//! Acceptance suite: one check per criterion, one `[PASS]`/`[FAIL]` line each.
//!
//! Runs without the libtest harness so every line is printed even when all
//! checks pass. The process exits non-zero if any criterion fails.

mod common;

use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use kerrsim::analysis::{
    error_prob, gap_approx, max_error_prob, outcome_probabilities, run_monte_carlo,
    MonteCarloRunner,
};
use kerrsim::feedforward::{apply_correction, apply_correction_unchecked, residual_relative_phase};
use kerrsim::homodyne::{classify, collapse, gap, marginal_pdf, midpoint};
use kerrsim::state::{cat_like_state, fidelity, make_product_state, uniform_state};
use kerrsim::{kerr_evolve, Backend, CircuitParams, SignalState};

type Check = Result<String, String>;
type Preset = Box<dyn Fn(Backend) -> SignalState>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn params(n: usize, alpha: f64, theta: f64) -> CircuitParams {
    CircuitParams::new(n, alpha, theta).expect("valid parameters")
}

/// Dense and symmetric backends agree through evolve, collapse and correction.
fn criterion_1() -> Check {
    let (alpha, theta) = (1e4, 0.01);
    let mut worst: f64 = 1.0;
    let mut points = 0;
    for n in 2..=12 {
        let p = params(n, alpha, theta);
        let presets: [(&str, Preset); 2] = [
            ("uniform", Box::new(move |b| uniform_state(n, b).unwrap())),
            (
                "product",
                Box::new(move |b| {
                    make_product_state(n, C64::new(0.6, 0.0), C64::new(0.8, 0.0), b).unwrap()
                }),
            ),
        ];
        for (name, build) in &presets {
            let jd = kerr_evolve(&p, &build(Backend::Dense)).unwrap();
            let js = kerr_evolve(&p, &build(Backend::Symmetric)).unwrap();
            let (lo, hi) = (p.peak(n) - 4.0, p.peak(p.t_min()) + 4.0);
            for i in 0..50 {
                let x = lo + (hi - lo) * i as f64 / 49.0;
                let t = classify(&p, x);
                let cd = apply_correction(&collapse(&jd, x).unwrap(), &p, t, x).unwrap();
                let cs = apply_correction(&collapse(&js, x).unwrap(), &p, t, x).unwrap();
                let f = fidelity(&cd.state, &cs.state).unwrap();
                ensure(f >= 1.0 - 1e-10, || {
                    format!("n={n} {name} x={x}: fidelity {f}")
                })?;
                worst = worst.min(f);
                points += 1;
            }
        }
    }
    Ok(format!("{points} points, min fidelity {worst:.15}"))
}

/// Number of distinct outcomes as x sweeps the line.
fn criterion_2() -> Check {
    let mut seen = Vec::new();
    for n in 2..=8 {
        let p = params(n, 1e4, 0.01);
        let (lo, hi) = (p.peak(n) - 20.0, p.peak(p.t_min()) + 20.0);
        let mut outcomes = std::collections::BTreeSet::new();
        for i in 0..=200_000 {
            outcomes.insert(classify(&p, lo + (hi - lo) * i as f64 / 200_000.0));
        }
        let expected = n.div_ceil(2) + usize::from(n % 2 == 0);
        ensure(outcomes.len() == expected, || {
            format!("n={n}: {} outcomes, expected {expected}", outcomes.len())
        })?;
        seen.push(format!("n={n}:{}", outcomes.len()));
    }
    Ok(seen.join(" "))
}

/// GHZ branch at a fixed x inside the t = n interval.
fn criterion_3() -> Check {
    let (alpha, theta) = (1e5, 0.01); // αθ² = 10
    let mut out = Vec::new();
    for n in [4usize, 5] {
        let p = params(n, alpha, theta);
        let x = midpoint(&p, n).unwrap() - 5.0;
        ensure(classify(&p, x) == n, || {
            format!("n={n}: x={x} not in the GHZ interval")
        })?;
        let joint = kerr_evolve(&p, &uniform_state(n, Backend::Symmetric).unwrap()).unwrap();
        let corrected = apply_correction(&collapse(&joint, x).unwrap(), &p, n, x).unwrap();
        let f = fidelity(&corrected.state, &cat_like_state(n, n).unwrap().into()).unwrap();
        let oracle = brute_output_fidelity(&brute_uniform(n), n, alpha, theta, x);
        ensure(f >= 1.0 - 1e-6, || format!("n={n}: fidelity {f}"))?;
        ensure((f - oracle).abs() <= 1e-12, || {
            format!("n={n}: fidelity {f}, brute-force oracle {oracle}")
        })?;
        out.push(format!("n={n}: F={f:.15}"));
    }
    Ok(out.join(", "))
}

/// Cat-like targets at each peak for n = 6.
fn criterion_4() -> Check {
    let (n, alpha, theta) = (6usize, 1e5, 0.01);
    let p = params(n, alpha, theta);
    let joint = kerr_evolve(&p, &uniform_state(n, Backend::Symmetric).unwrap()).unwrap();
    let mut out = Vec::new();
    for t in [2usize, 4, 6] {
        let x = p.peak(t);
        let corrected = apply_correction(&collapse(&joint, x).unwrap(), &p, t, x).unwrap();
        let f = fidelity(&corrected.state, &cat_like_state(n, t).unwrap().into()).unwrap();
        ensure(f >= 1.0 - 1e-6, || format!("t={t}: fidelity {f}"))?;
        out.push(format!("k={}: F={f:.15}", t / 2));
    }
    Ok(out.join(", "))
}

/// Empirical misclassification of |HH⟩ against the normal tail P(Z > 1).
fn criterion_5() -> Check {
    let p = params(2, 2e4, 0.01); // αθ² = 2
    let hh = make_product_state(
        2,
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        Backend::Symmetric,
    )
    .unwrap();
    let trials = 1_000_000u64;
    let start = Instant::now();
    let report = run_monte_carlo(&p, &hh, trials, 20_240_601).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let target = 0.158655;
    let sigma = (target * (1.0 - target) / trials as f64).sqrt();
    let rate = report.empirical_misclassification;
    ensure((rate - target).abs() <= 3.0 * sigma, || {
        format!("rate {rate}, target {target} ± {}", 3.0 * sigma)
    })?;
    ensure(elapsed <= 60.0, || format!("took {elapsed:.1} s"))?;
    Ok(format!(
        "rate {rate:.6} vs {target} ± {:.6} ({elapsed:.1} s)",
        3.0 * sigma
    ))
}

/// Closed-form ε_max against the arbitrary-precision tail.
fn criterion_6() -> Check {
    let mut out = Vec::new();
    for (alpha, stated) in [(2e4, 0.158655253931), (8e4, 3.16712e-5)] {
        let p = params(4, alpha, 0.01);
        let g = alpha * 0.01 * 0.01;
        let got = max_error_prob(&p);
        let oracle = normal_tail_oracle(g / 2.0);
        let rel = (got - oracle).abs() / oracle;
        ensure(rel <= 1e-9, || {
            format!("αθ²={g}: {got} vs oracle {oracle} (rel {rel:e})")
        })?;
        ensure((got - stated).abs() / stated <= 1e-5, || {
            format!("αθ²={g}: {got} vs stated {stated}")
        })?;
        out.push(format!("αθ²={g}: {got:.12e} (rel {rel:.1e})"));
    }
    Ok(out.join(", "))
}

/// Small-angle gap within θ²(k² + 1).
fn criterion_7() -> Check {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for theta in [0.001, 0.01, 0.1] {
        for n in [20usize, 19, 10, 9] {
            if n as f64 * theta > std::f64::consts::FRAC_PI_2 {
                continue;
            }
            let p = params(n, 1e4, theta);
            for t in p.outcomes().skip(1) {
                let k = t as f64 / 2.0;
                if k > 10.0 || k * theta > 0.5 {
                    continue;
                }
                let exact = gap(&p, t).unwrap();
                let rel = (exact - gap_approx(&p, t).unwrap()).abs() / exact;
                let bound = theta * theta * (k * k + 1.0);
                ensure(rel <= bound, || {
                    format!("θ={theta} k={k}: rel {rel:e} > {bound:e}")
                })?;
                worst = worst.max(rel / bound);
                count += 1;
            }
        }
    }
    Ok(format!(
        "{count} (θ, k) pairs, largest rel/bound {worst:.3}"
    ))
}

/// Every ε_k at most ε_max. The exact first gap `4α sin²(θ/2)` is strictly
/// smaller than `αθ²`, so k = 1 is expected to exceed ε_max slightly.
fn criterion_8() -> Check {
    let mut violations = Vec::new();
    let mut count = 0;
    for n in 4..=20 {
        for theta in [0.001, 0.01, 0.05] {
            if n as f64 * theta > std::f64::consts::FRAC_PI_2 {
                continue;
            }
            for a_theta2 in [0.5, 1.0, 2.0, 8.0] {
                let p = params(n, a_theta2 / (theta * theta), theta);
                let eps_max = max_error_prob(&p);
                for t in p.outcomes().skip(1) {
                    let e = error_prob(&p, t).unwrap();
                    count += 1;
                    if e > eps_max {
                        violations.push((n, theta, a_theta2, t, e, eps_max));
                    }
                }
            }
        }
    }
    if violations.is_empty() {
        return Ok(format!("{count} comparisons"));
    }
    let ks: std::collections::BTreeSet<String> = violations
        .iter()
        .map(|v| format!("{}", v.3 as f64 / 2.0))
        .collect();
    let (n, theta, g, t, e, m) = violations[0];
    Err(format!(
        "{} of {count} comparisons exceed ε_max (k ∈ {{{}}}); e.g. n={n} θ={theta} αθ²={g} k={}: ε={e:.10e} > ε_max={m:.10e}",
        violations.len(),
        ks.into_iter().collect::<Vec<_>>().join(","),
        t as f64 / 2.0
    ))
}

/// Residual relative phase after correction on random (x, k, α, θ).
fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(2..=20usize);
        let theta_max = (std::f64::consts::FRAC_PI_2 / n as f64).min(0.1);
        let theta = 10f64.powf(rng.random_range(-3.0..theta_max.log10()));
        let alpha = 10f64.powf(rng.random_range(2.0..5.0));
        let p = params(n, alpha, theta);
        let t = p.t_min()
            + 2 * rng.random_range(if p.t_min() == 0 { 1 } else { 0 }..=(n - p.t_min()) / 2);
        let x = p.peak(t) + rng.random_range(-3.0..3.0);
        let input = uniform_state(n, Backend::Symmetric).unwrap();
        let joint = kerr_evolve(&p, &input).unwrap();
        let corrected =
            apply_correction_unchecked(&collapse(&joint, x).unwrap(), &p, t, x).unwrap();
        let r = residual_relative_phase(&corrected.state, &input, &p, t).unwrap();
        ensure(r <= 1e-10, || {
            format!("n={n} t={t} α={alpha} θ={theta} x={x}: residual {r:e}")
        })?;
        worst = worst.max(r);
    }
    Ok(format!("max residual {worst:.2e} rad"))
}

/// Homodyne density integrates to one; outcome probabilities sum to one.
fn criterion_10() -> Check {
    let mut worst_int: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    for n in 2..=8 {
        let p = params(n, 1e4, 0.01);
        let joint = kerr_evolve(&p, &uniform_state(n, Backend::Symmetric).unwrap()).unwrap();
        let (lo, hi) = (p.peak(n) - 10.0, p.peak(p.t_min()) + 10.0);
        let integral = simpson_panels(&|x| marginal_pdf(&joint, x), lo, hi, 64, 1e-12);
        let total: f64 = outcome_probabilities(&joint).iter().map(|(_, q)| q).sum();
        ensure((integral - 1.0).abs() <= 1e-8, || {
            format!("n={n}: ∫p = {integral}")
        })?;
        ensure((total - 1.0).abs() <= 1e-10, || {
            format!("n={n}: Σ P_t = {total}")
        })?;
        worst_int = worst_int.max((integral - 1.0).abs());
        worst_sum = worst_sum.max((total - 1.0).abs());
    }
    Ok(format!(
        "max |∫p - 1| = {worst_int:.1e}, max |Σ P_t - 1| = {worst_sum:.1e}"
    ))
}

/// Median wall time of one full trial at n = 1000 on the symmetric backend.
fn criterion_11() -> Check {
    let n = 1000;
    let p = params(n, 1e6, 1e-3); // nθ = 1 ≤ π/2, αθ² = 1
    let runner = MonteCarloRunner::new(&p, &uniform_state(n, Backend::Symmetric).unwrap()).unwrap();
    let mut times = Vec::new();
    for i in 0..201 {
        let start = Instant::now();
        runner.trial(11, i).unwrap();
        times.push(start.elapsed().as_secs_f64());
    }
    times.sort_by(f64::total_cmp);
    let median_ms = times[times.len() / 2] * 1e3;
    ensure(median_ms <= 10.0, || format!("median {median_ms:.3} ms"))?;
    Ok(format!("median {median_ms:.3} ms per trial"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("backend equivalence", criterion_1),
        ("interval count parity", criterion_2),
        ("GHZ branch", criterion_3),
        ("cat-like targets", criterion_4),
        ("empirical misclassification", criterion_5),
        ("closed-form ε_max", criterion_6),
        ("gap approximation", criterion_7),
        ("ε_k ≤ ε_max dominance", criterion_8),
        ("phase cancellation", criterion_9),
        ("normalization", criterion_10),
        ("performance at n = 1000", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        match result {
            Ok(detail) => println!("[PASS] criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
