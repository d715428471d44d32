//! Independent reference implementations used only by the test suite.
//!
//! Nothing here calls into the library's numerics: the erfc oracle works in
//! big-integer fixed point, quadrature is plain adaptive Simpson, and the
//! brute-force pipeline tracks every bitstring with explicit per-photon phases.

#![allow(dead_code)]

use num_bigint::{BigInt, Sign};
use num_complex::Complex64 as C64;

// ---------------------------------------------------------------------------
// Arbitrary-precision erfc

/// Fixed-point number `value = mantissa / 2^bits`.
struct Fixed {
    bits: u32,
}

impl Fixed {
    fn one(&self) -> BigInt {
        BigInt::from(1) << self.bits
    }

    fn encode(&self, x: f64) -> BigInt {
        // f64 is m·2^e with |m| < 2^53, exact as long as bits + e >= 0
        let bits = x.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let mut v = BigInt::from(m);
        let shift = self.bits as i64 + e;
        v = if shift >= 0 {
            v << shift as usize
        } else {
            v >> (-shift) as usize
        };
        if x.is_sign_negative() {
            -v
        } else {
            v
        }
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.bits as usize
    }

    fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.bits as usize) / b
    }

    /// `atan(1/q)` by its Taylor series.
    fn atan_inv(&self, q: u64) -> BigInt {
        let q = BigInt::from(q);
        let q2 = &q * &q;
        let mut power = self.one() / &q;
        let mut sum = BigInt::from(0);
        let mut k = 0u64;
        while power.sign() != Sign::NoSign {
            let term = &power / BigInt::from(2 * k + 1);
            if k.is_multiple_of(2) {
                sum += term;
            } else {
                sum -= term;
            }
            power /= &q2;
            k += 1;
        }
        sum
    }

    /// Machin: `π = 16 atan(1/5) − 4 atan(1/239)`.
    fn pi(&self) -> BigInt {
        self.atan_inv(5) * 16 - self.atan_inv(239) * 4
    }

    fn to_f64(&self, v: &BigInt) -> f64 {
        let (sign, mag) = (v.sign(), v.magnitude());
        if mag.bits() == 0 {
            return 0.0;
        }
        let len = mag.bits() as i64;
        let drop = (len - 64).max(0);
        let top: u64 = (mag >> drop as usize).try_into().expect("64 bits");
        let mut exp = drop - self.bits as i64;
        let mut out = top as f64;
        while exp < -500 {
            out *= 2f64.powi(-500);
            exp += 500;
        }
        while exp > 500 {
            out *= 2f64.powi(500);
            exp -= 500;
        }
        out *= 2f64.powi(exp as i32);
        if sign == Sign::Minus {
            -out
        } else {
            out
        }
    }
}

/// `erfc(z)` from the alternating Maclaurin series of erf, evaluated with
/// enough guard bits to absorb its cancellation. Accurate to well below 1e-15
/// relative for `z` in `[-10, 27]`.
pub fn erfc_oracle(z: f64) -> f64 {
    let a = z.abs();
    // terms peak near e^{z²}; the result can be as small as e^{-z²}
    let guard = (2.0 * a * a * std::f64::consts::LOG2_E) as u32;
    let fx = Fixed { bits: guard + 256 };
    let zf = fx.encode(a);
    let z2 = fx.mul(&zf, &zf);
    let mut term = zf.clone(); // z^{2k+1} / k!
    let mut sum = BigInt::from(0);
    let mut k = 0u64;
    loop {
        let contrib = &term / BigInt::from(2 * k + 1);
        if contrib.sign() == Sign::NoSign {
            break;
        }
        if k.is_multiple_of(2) {
            sum += contrib;
        } else {
            sum -= contrib;
        }
        k += 1;
        term = fx.mul(&term, &z2) / BigInt::from(k);
    }
    let sqrt_pi = (fx.pi() << fx.bits as usize).sqrt();
    let erf = fx.div(&(sum * 2), &sqrt_pi);
    let erfc_abs = fx.one() - erf;
    let v = if z < 0.0 {
        fx.one() * 2 - erfc_abs
    } else {
        erfc_abs
    };
    fx.to_f64(&v)
}

/// `P(Z > z)` for a standard normal, from the erfc oracle.
pub fn normal_tail_oracle(z: f64) -> f64 {
    0.5 * erfc_oracle(z / std::f64::consts::SQRT_2)
}

/// Standard normal CDF straight from libm, for bulk use where the big-integer
/// oracle would be too slow.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

// ---------------------------------------------------------------------------
// Quadrature

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Simpson over `[a, b]` split into `pieces` equal panels, so that narrow
/// peaks cannot be skipped by the first coarse estimate.
pub fn simpson_panels<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, pieces: usize, tol: f64) -> f64 {
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            simpson(
                f,
                a + i as f64 * h,
                a + (i + 1) as f64 * h,
                tol / pieces as f64,
            )
        })
        .sum()
}

// ---------------------------------------------------------------------------
// Brute-force dense pipeline

pub fn popcount(s: usize) -> usize {
    s.count_ones() as usize
}

/// Probe phase of bitstring `s`, accumulated photon by photon: θ per H photon,
/// 2θ per V photon, then the fixed gate `-3nθ/2`.
pub fn brute_probe_phase(n: usize, s: usize, theta: f64) -> f64 {
    let mut phase = 0.0;
    for i in 0..n {
        phase += if (s >> i) & 1 == 1 {
            2.0 * theta
        } else {
            theta
        };
    }
    phase - 1.5 * n as f64 * theta
}

/// `⟨x|α e^{iβ}⟩` with phase `α sin β (x - 2α cos β)` and no further global phase.
pub fn coherent_overlap(x: f64, alpha: f64, beta: f64) -> C64 {
    let c = 2.0 * alpha * beta.cos();
    let mag = (2.0 * std::f64::consts::PI).powf(-0.25) * (-(x - c) * (x - c) / 4.0).exp();
    C64::from_polar(mag, alpha * beta.sin() * (x - c))
}

/// Uniform dense input.
pub fn brute_uniform(n: usize) -> Vec<C64> {
    vec![C64::new((0.5f64).powf(n as f64 / 2.0), 0.0); 1 << n]
}

/// `(β|H⟩ + γ|V⟩)^{⊗n}` by explicit products.
pub fn brute_product(n: usize, beta: C64, gamma: C64) -> Vec<C64> {
    (0..1usize << n)
        .map(|s| {
            (0..n).fold(C64::new(1.0, 0.0), |acc, i| {
                acc * if (s >> i) & 1 == 1 { gamma } else { beta }
            })
        })
        .collect()
}

/// Signal amplitudes conditioned on homodyne value `x`, normalized.
pub fn brute_collapse(input: &[C64], n: usize, alpha: f64, theta: f64, x: f64) -> Vec<C64> {
    let out: Vec<C64> = input
        .iter()
        .enumerate()
        .map(|(s, a)| a * coherent_overlap(x, alpha, brute_probe_phase(n, s, theta)))
        .collect();
    normalize(out)
}

/// Applies `exp(-i·w·ϕ_k(x)/k)` with `k = t/2` to every bitstring of weight `w`.
pub fn brute_correct(state: &[C64], alpha: f64, theta: f64, t: usize, x: f64) -> Vec<C64> {
    if t == 0 {
        return state.to_vec();
    }
    let k = t as f64 / 2.0;
    let phi = alpha * (k * theta).sin() * (x - 2.0 * alpha * (k * theta).cos());
    let per_photon = phi / k;
    state
        .iter()
        .enumerate()
        .map(|(s, a)| a * C64::from_polar(1.0, -(popcount(s) as f64) * per_photon))
        .collect()
}

/// Input restricted to weights `(n ∓ t)/2`, normalized.
pub fn brute_target(input: &[C64], n: usize, t: usize) -> Vec<C64> {
    let (lo, hi) = ((n - t) / 2, (n + t) / 2);
    normalize(
        input
            .iter()
            .enumerate()
            .map(|(s, a)| {
                if popcount(s) == lo || popcount(s) == hi {
                    *a
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect(),
    )
}

/// Outcome for `x`: the nearest peak of the full ladder, populated or not.
pub fn brute_classify(n: usize, alpha: f64, theta: f64, x: f64) -> usize {
    let mut best = (f64::INFINITY, 0usize);
    // scan from the largest t down so that ties go to the larger t
    for j in (0..=n / 2).rev() {
        let t = n % 2 + 2 * j;
        let c = 2.0 * alpha * (t as f64 * theta / 2.0).cos();
        let d = (x - c).abs();
        if d < best.0 {
            best = (d, t);
        }
    }
    best.1
}

pub fn normalize(v: Vec<C64>) -> Vec<C64> {
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

pub fn brute_fidelity(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<C64>()
        .norm_sqr()
}

/// Full pipeline: collapse at `x`, classify, correct, fidelity to the heralded target.
pub fn brute_output_fidelity(input: &[C64], n: usize, alpha: f64, theta: f64, x: f64) -> f64 {
    let cond = brute_collapse(input, n, alpha, theta, x);
    let t = brute_classify(n, alpha, theta, x);
    let corrected = brute_correct(&cond, alpha, theta, t, x);
    brute_fidelity(&corrected, &brute_target(input, n, t))
}

// ---------------------------------------------------------------------------
// Misc

/// Dense amplitudes of a library state as a plain vector.
pub fn dense_of(state: &kerrsim::SignalState) -> Vec<C64> {
    state.to_dense().unwrap().amplitudes().to_vec()
}

/// Kolmogorov–Smirnov distance between sorted samples and a CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
