//! n-photon polarization states in dense (bitstring) and permutation-symmetric
//! (weight-basis) form.
//!
//! Bit value 1 marks a V-polarized photon, 0 an H-polarized one. The weight `w`
//! of a basis term is its number of V photons. A [`SymmetricSignalState`]
//! stores one amplitude `c_w` per normalized Dicke state `|D_w⟩`, so the dense
//! amplitude of every weight-`w` bitstring is `c_w / sqrt(C(n, w))`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{SimError, SimResult};
use crate::special::{binomial, ln_binomials, NeumaierSum};

/// Largest photon count held by the dense backend (2^24 amplitudes).
pub const DENSE_CAP: usize = 24;
/// Largest photon count held by the symmetric backend.
pub const SYMMETRIC_CAP: usize = 100_000;
/// Tolerance on `Σ|a|² = 1` used by every normalization check.
pub const NORM_TOLERANCE: f64 = 1e-10;

// below this distance from unit norm `normalize` is the identity, which makes it idempotent
const RENORM_SKIP: f64 = 1e-14;
// product states up to this n are built with exact binomials and complex powers
const EXACT_PRODUCT_MAX_N: usize = 60;

/// Storage layout of a signal state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Dense,
    Symmetric,
}

impl Backend {
    pub fn cap(self) -> usize {
        match self {
            Backend::Dense => DENSE_CAP,
            Backend::Symmetric => SYMMETRIC_CAP,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Dense => "dense",
            Backend::Symmetric => "symmetric",
        }
    }

    fn check_capacity(self, n: usize) -> SimResult<()> {
        if n > self.cap() {
            return Err(SimError::Capacity {
                n,
                cap: self.cap(),
                backend: self.name(),
            });
        }
        Ok(())
    }
}

/// Number of V photons in a dense basis index.
#[inline]
pub fn weight_of(index: usize) -> usize {
    index.count_ones() as usize
}

fn norm_sq_of(amps: &[C64]) -> f64 {
    amps.iter()
        .map(|a| a.norm_sqr())
        .collect::<NeumaierSum>()
        .value()
}

fn scaled(amps: &[C64], norm_sq: f64) -> SimResult<Vec<C64>> {
    if norm_sq.is_nan() || norm_sq <= 0.0 || norm_sq.is_infinite() {
        return Err(SimError::Normalization {
            norm_sq,
            tolerance: NORM_TOLERANCE,
        });
    }
    if (norm_sq - 1.0).abs() <= RENORM_SKIP {
        return Ok(amps.to_vec());
    }
    let inv = norm_sq.sqrt().recip();
    Ok(amps.iter().map(|a| a * inv).collect())
}

fn check_unit(norm_sq: f64) -> SimResult<()> {
    if (norm_sq - 1.0).abs() > NORM_TOLERANCE || !norm_sq.is_finite() {
        return Err(SimError::Normalization {
            norm_sq,
            tolerance: NORM_TOLERANCE,
        });
    }
    Ok(())
}

/// Full 2^n amplitude vector indexed by polarization bitstring.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSignalState {
    n: usize,
    amplitudes: Vec<C64>,
}

impl DenseSignalState {
    /// Wraps raw amplitudes. Normalization is not enforced here; see [`Self::normalize`].
    pub fn new(n: usize, amplitudes: Vec<C64>) -> SimResult<Self> {
        if n == 0 {
            return Err(SimError::InvalidParams(
                "photon count must be at least 1".into(),
            ));
        }
        Backend::Dense.check_capacity(n)?;
        if amplitudes.len() != 1 << n {
            return Err(SimError::Shape {
                expected: 1 << n,
                found: amplitudes.len(),
            });
        }
        Ok(Self { n, amplitudes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq_of(&self.amplitudes)
    }

    pub fn normalize(&self) -> SimResult<Self> {
        Ok(Self {
            n: self.n,
            amplitudes: scaled(&self.amplitudes, self.norm_sq())?,
        })
    }

    /// Sum of the amplitudes in each weight class.
    fn class_sums(&self) -> Vec<C64> {
        let mut re = vec![NeumaierSum::new(); self.n + 1];
        let mut im = vec![NeumaierSum::new(); self.n + 1];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let w = weight_of(i);
            re[w].add(a.re);
            im[w].add(a.im);
        }
        re.iter()
            .zip(&im)
            .map(|(r, i)| C64::new(r.value(), i.value()))
            .collect()
    }
}

/// Amplitudes `c_w` over the Dicke basis `|D_w⟩`, `w = 0..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricSignalState {
    n: usize,
    weight_amplitudes: Vec<C64>,
}

impl SymmetricSignalState {
    pub fn new(n: usize, weight_amplitudes: Vec<C64>) -> SimResult<Self> {
        if n == 0 {
            return Err(SimError::InvalidParams(
                "photon count must be at least 1".into(),
            ));
        }
        Backend::Symmetric.check_capacity(n)?;
        if weight_amplitudes.len() != n + 1 {
            return Err(SimError::Shape {
                expected: n + 1,
                found: weight_amplitudes.len(),
            });
        }
        Ok(Self {
            n,
            weight_amplitudes,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight_amplitudes(&self) -> &[C64] {
        &self.weight_amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq_of(&self.weight_amplitudes)
    }

    pub fn normalize(&self) -> SimResult<Self> {
        Ok(Self {
            n: self.n,
            weight_amplitudes: scaled(&self.weight_amplitudes, self.norm_sq())?,
        })
    }

    /// Expands into 2^n bitstring amplitudes; each weight-`w` bitstring gets `c_w / sqrt(C(n, w))`.
    pub fn to_dense(&self) -> SimResult<DenseSignalState> {
        Backend::Dense.check_capacity(self.n)?;
        let per_basis: Vec<C64> = self
            .weight_amplitudes
            .iter()
            .enumerate()
            .map(|(w, c)| c / binomial(self.n, w).sqrt())
            .collect();
        let amplitudes = (0..1usize << self.n)
            .map(|i| per_basis[weight_of(i)])
            .collect();
        DenseSignalState::new(self.n, amplitudes)
    }
}

/// A signal state in either representation.
#[derive(Clone, Debug, PartialEq)]
pub enum SignalState {
    Dense(DenseSignalState),
    Symmetric(SymmetricSignalState),
}

impl From<DenseSignalState> for SignalState {
    fn from(s: DenseSignalState) -> Self {
        SignalState::Dense(s)
    }
}

impl From<SymmetricSignalState> for SignalState {
    fn from(s: SymmetricSignalState) -> Self {
        SignalState::Symmetric(s)
    }
}

impl SignalState {
    pub fn n(&self) -> usize {
        match self {
            SignalState::Dense(s) => s.n,
            SignalState::Symmetric(s) => s.n,
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            SignalState::Dense(_) => Backend::Dense,
            SignalState::Symmetric(_) => Backend::Symmetric,
        }
    }

    pub fn norm_sq(&self) -> f64 {
        match self {
            SignalState::Dense(s) => s.norm_sq(),
            SignalState::Symmetric(s) => s.norm_sq(),
        }
    }

    pub fn normalize(&self) -> SimResult<SignalState> {
        Ok(match self {
            SignalState::Dense(s) => s.normalize()?.into(),
            SignalState::Symmetric(s) => s.normalize()?.into(),
        })
    }

    /// Fails unless `Σ|a|² = 1` within [`NORM_TOLERANCE`].
    pub fn ensure_normalized(&self) -> SimResult<()> {
        check_unit(self.norm_sq())
    }

    /// Dense form of the state (a copy for dense states).
    pub fn to_dense(&self) -> SimResult<DenseSignalState> {
        match self {
            SignalState::Dense(s) => Ok(s.clone()),
            SignalState::Symmetric(s) => s.to_dense(),
        }
    }

    /// Multiplies every weight-`w` amplitude by `factors[w]`. No renormalization.
    pub fn scale_by_weight(&self, factors: &[C64]) -> SimResult<SignalState> {
        if factors.len() != self.n() + 1 {
            return Err(SimError::Shape {
                expected: self.n() + 1,
                found: factors.len(),
            });
        }
        Ok(match self {
            SignalState::Dense(s) => SignalState::Dense(DenseSignalState {
                n: s.n,
                amplitudes: s
                    .amplitudes
                    .iter()
                    .enumerate()
                    .map(|(i, a)| a * factors[weight_of(i)])
                    .collect(),
            }),
            SignalState::Symmetric(s) => SignalState::Symmetric(SymmetricSignalState {
                n: s.n,
                weight_amplitudes: s
                    .weight_amplitudes
                    .iter()
                    .zip(factors)
                    .map(|(a, f)| a * f)
                    .collect(),
            }),
        })
    }

    /// Multiplies every amplitude by the same factor.
    pub fn scale(&self, factor: C64) -> SignalState {
        match self {
            SignalState::Dense(s) => SignalState::Dense(DenseSignalState {
                n: s.n,
                amplitudes: s.amplitudes.iter().map(|a| a * factor).collect(),
            }),
            SignalState::Symmetric(s) => SignalState::Symmetric(SymmetricSignalState {
                n: s.n,
                weight_amplitudes: s.weight_amplitudes.iter().map(|a| a * factor).collect(),
            }),
        }
    }

    /// Squared norm carried by each weight class (unnormalized).
    pub fn class_norms(&self) -> Vec<f64> {
        match self {
            SignalState::Dense(s) => {
                let mut acc = vec![NeumaierSum::new(); s.n + 1];
                for (i, a) in s.amplitudes.iter().enumerate() {
                    acc[weight_of(i)].add(a.norm_sqr());
                }
                acc.iter().map(NeumaierSum::value).collect()
            }
            SignalState::Symmetric(s) => s.weight_amplitudes.iter().map(|c| c.norm_sqr()).collect(),
        }
    }

    /// Largest single-bitstring amplitude (first one on ties), as seen in the dense picture.
    pub fn dominant_basis_amplitude(&self) -> C64 {
        let mut best = C64::new(0.0, 0.0);
        let mut best_mag = f64::NEG_INFINITY;
        match self {
            SignalState::Dense(s) => {
                for a in &s.amplitudes {
                    let m = a.norm_sqr();
                    if m > best_mag {
                        best_mag = m;
                        best = *a;
                    }
                }
            }
            SignalState::Symmetric(s) => {
                let ln_c = ln_binomials(s.n);
                for (w, c) in s.weight_amplitudes.iter().enumerate() {
                    if c.norm_sqr() == 0.0 {
                        continue;
                    }
                    // log of the per-bitstring magnitude |c_w| / sqrt(C(n, w))
                    let m = c.norm().ln() - 0.5 * ln_c[w];
                    if m > best_mag {
                        best_mag = m;
                        best = c * (-0.5 * ln_c[w]).exp();
                    }
                }
            }
        }
        best
    }
}

/// Marginal probabilities `P_w` of finding `w` V photons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightDistribution {
    pub probabilities: Vec<f64>,
}

impl WeightDistribution {
    pub fn n(&self) -> usize {
        self.probabilities.len() - 1
    }

    pub fn get(&self, w: usize) -> f64 {
        self.probabilities.get(w).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities
            .iter()
            .copied()
            .collect::<NeumaierSum>()
            .value()
    }
}

/// Weight-class probabilities of a normalized state.
pub fn weight_probabilities(state: &SignalState) -> SimResult<WeightDistribution> {
    state.ensure_normalized()?;
    Ok(WeightDistribution {
        probabilities: state.class_norms(),
    })
}

/// Product of `n` identical single-photon states `β|H⟩ + γ|V⟩`.
pub fn make_product_state(
    n: usize,
    beta: C64,
    gamma: C64,
    backend: Backend,
) -> SimResult<SignalState> {
    check_unit(beta.norm_sqr() + gamma.norm_sqr())?;
    if n == 0 {
        return Err(SimError::InvalidParams(
            "photon count must be at least 1".into(),
        ));
    }
    backend.check_capacity(n)?;
    match backend {
        Backend::Dense => {
            let per_weight: Vec<C64> = (0..=n).map(|w| product_term(beta, gamma, n, w)).collect();
            let amplitudes = (0..1usize << n).map(|i| per_weight[weight_of(i)]).collect();
            Ok(DenseSignalState::new(n, amplitudes)?.into())
        }
        Backend::Symmetric => {
            let amps = if n <= EXACT_PRODUCT_MAX_N {
                (0..=n)
                    .map(|w| product_term(beta, gamma, n, w) * binomial(n, w).sqrt())
                    .collect()
            } else {
                log_space_product(n, beta, gamma)
            };
            Ok(SymmetricSignalState::new(n, amps)?.normalize()?.into())
        }
    }
}

/// The uniform superposition, every `a_s = 2^{-n/2}`.
pub fn uniform_state(n: usize, backend: Backend) -> SimResult<SignalState> {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    make_product_state(n, h, h, backend)
}

fn product_term(beta: C64, gamma: C64, n: usize, w: usize) -> C64 {
    beta.powu((n - w) as u32) * gamma.powu(w as u32)
}

fn log_space_product(n: usize, beta: C64, gamma: C64) -> Vec<C64> {
    let zero = C64::new(0.0, 0.0);
    if beta.norm_sqr() == 0.0 {
        let mut v = vec![zero; n + 1];
        v[n] = C64::from_polar(1.0, n as f64 * gamma.arg());
        return v;
    }
    if gamma.norm_sqr() == 0.0 {
        let mut v = vec![zero; n + 1];
        v[0] = C64::from_polar(1.0, n as f64 * beta.arg());
        return v;
    }
    let ln_c = ln_binomials(n);
    let (lb, lg) = (beta.norm().ln(), gamma.norm().ln());
    let (pb, pg) = (beta.arg(), gamma.arg());
    (0..=n)
        .map(|w| {
            let (h, v) = ((n - w) as f64, w as f64);
            C64::from_polar((0.5 * ln_c[w] + h * lb + v * lg).exp(), h * pb + v * pg)
        })
        .collect()
}

/// Normalized Dicke state with `w` V photons.
pub fn dicke_state(n: usize, w: usize) -> SimResult<SymmetricSignalState> {
    if w > n {
        return Err(SimError::Index {
            what: "dicke weight",
            value: w,
            min: 0,
            max: n,
        });
    }
    let mut amps = vec![C64::new(0.0, 0.0); n + 1];
    amps[w] = C64::new(1.0, 0.0);
    SymmetricSignalState::new(n, amps)
}

/// Validates a twice-index `t = 2k` against the parity of `n` and `0 <= t <= n`.
pub fn check_twice_index(n: usize, t: usize) -> SimResult<()> {
    if t > n {
        return Err(SimError::Index {
            what: "twice-index",
            value: t,
            min: n % 2,
            max: n,
        });
    }
    if t % 2 != n % 2 {
        return Err(SimError::Parity { t, n });
    }
    Ok(())
}

/// The weight classes `{n/2 - k, n/2 + k}` selected by twice-index `t = 2k`
/// (a single class when `t = 0`).
pub fn outcome_weights(n: usize, t: usize) -> SimResult<(usize, usize)> {
    check_twice_index(n, t)?;
    Ok(((n - t) / 2, (n + t) / 2))
}

/// Cat-like state `(|D_{n/2-k}⟩ + |D_{n/2+k}⟩)/√2` for twice-index `t = 2k >= 1`.
/// `t = n` gives the GHZ state.
pub fn cat_like_state(n: usize, t: usize) -> SimResult<SymmetricSignalState> {
    if n < 2 {
        return Err(SimError::InvalidParams(
            "cat-like states need n >= 2".into(),
        ));
    }
    check_twice_index(n, t)?;
    if t == 0 {
        return Err(SimError::Index {
            what: "cat-like twice-index",
            value: 0,
            min: 2,
            max: n,
        });
    }
    let (lo, hi) = outcome_weights(n, t)?;
    let mut amps = vec![C64::new(0.0, 0.0); n + 1];
    amps[lo] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[hi] = amps[lo];
    SymmetricSignalState::new(n, amps)
}

/// Ideal state heralded by outcome `t` for a uniform input: the balanced
/// Dicke state for `t = 0`, the cat-like state otherwise.
pub fn target_state(n: usize, t: usize) -> SimResult<SymmetricSignalState> {
    check_twice_index(n, t)?;
    if t == 0 {
        dicke_state(n, n / 2)
    } else {
        cat_like_state(n, t)
    }
}

/// Inner product `⟨a|b⟩`.
pub fn inner_product(a: &SignalState, b: &SignalState) -> SimResult<C64> {
    if a.n() != b.n() {
        return Err(SimError::Dimension {
            expected: a.n(),
            found: b.n(),
        });
    }
    let pairs: Vec<C64> = match (a, b) {
        (SignalState::Dense(x), SignalState::Dense(y)) => x
            .amplitudes
            .iter()
            .zip(&y.amplitudes)
            .map(|(p, q)| p.conj() * q)
            .collect(),
        (SignalState::Symmetric(x), SignalState::Symmetric(y)) => x
            .weight_amplitudes
            .iter()
            .zip(&y.weight_amplitudes)
            .map(|(p, q)| p.conj() * q)
            .collect(),
        (SignalState::Symmetric(x), SignalState::Dense(y)) => symmetric_dense_terms(x, y),
        (SignalState::Dense(x), SignalState::Symmetric(y)) => symmetric_dense_terms(y, x)
            .into_iter()
            .map(|z| z.conj())
            .collect(),
    };
    let re: NeumaierSum = pairs.iter().map(|z| z.re).collect();
    let im: NeumaierSum = pairs.iter().map(|z| z.im).collect();
    Ok(C64::new(re.value(), im.value()))
}

// ⟨sym|dense⟩ = Σ_w conj(c_w) / sqrt(C(n,w)) · Σ_{|s|=w} a_s
fn symmetric_dense_terms(sym: &SymmetricSignalState, dense: &DenseSignalState) -> Vec<C64> {
    let sums = dense.class_sums();
    sym.weight_amplitudes
        .iter()
        .enumerate()
        .map(|(w, c)| c.conj() * sums[w] / binomial(sym.n, w).sqrt())
        .collect()
}

/// `|⟨a|b⟩|²`, clamped to `[0, 1]`.
pub fn fidelity(a: &SignalState, b: &SignalState) -> SimResult<f64> {
    Ok(inner_product(a, b)?.norm_sqr().clamp(0.0, 1.0))
}
