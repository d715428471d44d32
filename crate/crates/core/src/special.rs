//! Complementary error function, standard normal tails and compensated summation.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{SimError, SimResult};

/// Lower end of the range accepted by [`erfc`].
pub const ERFC_MIN: f64 = -10.0;
/// Upper end of the range accepted by [`erfc`].
pub const ERFC_MAX: f64 = 40.0;

/// Complementary error function on `[-10, 40]`.
///
/// Values beyond `z ≈ 26.5` underflow to zero in double precision.
pub fn erfc(z: f64) -> SimResult<f64> {
    if !(ERFC_MIN..=ERFC_MAX).contains(&z) {
        return Err(SimError::Domain(z));
    }
    Ok(libm::erfc(z))
}

/// `P(Z > z)` for a standard normal `Z`, defined on the whole extended real line.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// `P(Z <= z)` for a standard normal `Z`.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// `P(a < Z <= b)` for a standard normal `Z`, evaluated from whichever tail keeps
/// the subtraction well conditioned. Infinite bounds are allowed.
pub fn normal_interval_mass(a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if a >= 0.0 {
        normal_sf(a) - normal_sf(b)
    } else if b <= 0.0 {
        normal_cdf(b) - normal_cdf(a)
    } else {
        1.0 - normal_cdf(a) - normal_sf(b)
    }
}

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator into this one.
    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// `ln C(n, w)` for `w = 0..=n`, built by the multiplicative recurrence.
pub fn ln_binomials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0_f64;
    out.push(acc);
    for w in 0..n {
        acc += ((n - w) as f64).ln() - ((w + 1) as f64).ln();
        out.push(acc);
    }
    // exact symmetry C(n, w) = C(n, n - w)
    for w in 0..=n / 2 {
        let v = out[w];
        out[n - w] = v;
    }
    out
}

/// Exact binomial coefficient as `f64` for small `n` (exact up to `n = 60`).
pub fn binomial(n: usize, w: usize) -> f64 {
    if w > n {
        return 0.0;
    }
    let w = w.min(n - w);
    let mut acc: u128 = 1;
    for i in 0..w {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}
