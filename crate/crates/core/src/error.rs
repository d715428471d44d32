use thiserror::Error;

/// Errors raised by state construction, circuit evolution, measurement and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    /// Amplitudes (or a single-photon pair) do not have unit norm.
    #[error("normalization error: squared norm {norm_sq} is not 1 within {tolerance:e}")]
    Normalization { norm_sq: f64, tolerance: f64 },

    /// A weight or outcome index lies outside its admissible range.
    #[error("index error: {what} = {value} outside [{min}, {max}]")]
    Index {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    /// A twice-index `t = 2k` has the wrong parity for the photon count.
    #[error("parity error: twice-index {t} does not match photon count {n} (mod 2)")]
    Parity { t: usize, n: usize },

    /// Two states (or a state and circuit parameters) disagree on the photon count.
    #[error("dimension error: expected n = {expected}, found n = {found}")]
    Dimension { expected: usize, found: usize },

    /// Amplitude vector length does not fit the declared representation.
    #[error("shape error: expected {expected} amplitudes, found {found}")]
    Shape { expected: usize, found: usize },

    /// Requested photon count exceeds what a backend can hold.
    #[error("capacity error: n = {n} exceeds the {backend} backend cap of {cap}")]
    Capacity {
        n: usize,
        cap: usize,
        backend: &'static str,
    },

    /// Circuit parameters violate a construction constraint.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The homodyne value lies so far from every peak that the conditional state is undefined.
    #[error("impossible outcome: x = {x} gives post-collapse norm below 1e-300")]
    ImpossibleOutcome { x: f64 },

    /// The input has no support on the weight classes heralded by outcome `t`.
    #[error("empty outcome: input has no support on the weight classes of twice-index {t}")]
    EmptyOutcome { t: usize },

    /// A correction was requested for an outcome other than the one the classifier returns.
    #[error("misrouting: correction for t = {requested} but x classifies to t = {classified}")]
    Misrouted { requested: usize, classified: usize },

    /// Argument outside the supported domain of a special function.
    #[error("domain error: argument {0} outside the supported range")]
    Domain(f64),
}

pub type SimResult<T> = Result<T, SimError>;
