//! Input presets and the custom-amplitude file format.
//!
//! A custom file is a JSON object
//! `{"n": 3, "backend": "dense", "amplitudes": [[re, im], ...]}` with `2^n`
//! (dense) or `n + 1` (symmetric) entries. Files whose squared norm is within
//! `1e-6` of one are accepted and renormalized exactly.

use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{SimError, SimResult};
use crate::state::{
    dicke_state, make_product_state, uniform_state, Backend, DenseSignalState, SignalState,
    SymmetricSignalState,
};

/// Tolerance on the squared norm of custom amplitude files.
pub const FILE_NORM_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeFile {
    pub n: usize,
    pub backend: Backend,
    pub amplitudes: Vec<[f64; 2]>,
}

impl AmplitudeFile {
    pub fn from_state(state: &SignalState) -> Self {
        let amps: Vec<C64> = match state {
            SignalState::Dense(d) => d.amplitudes().to_vec(),
            SignalState::Symmetric(s) => s.weight_amplitudes().to_vec(),
        };
        Self {
            n: state.n(),
            backend: state.backend(),
            amplitudes: amps.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    /// Validates shape and norm, then renormalizes.
    pub fn into_state(self) -> SimResult<SignalState> {
        let amps: Vec<C64> = self
            .amplitudes
            .iter()
            .map(|[re, im]| C64::new(*re, *im))
            .collect();
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(SimError::InvalidParams(
                "non-finite amplitude in custom file".into(),
            ));
        }
        let state: SignalState = match self.backend {
            Backend::Dense => DenseSignalState::new(self.n, amps)?.into(),
            Backend::Symmetric => SymmetricSignalState::new(self.n, amps)?.into(),
        };
        let norm_sq = state.norm_sq();
        if (norm_sq - 1.0).abs() > FILE_NORM_TOLERANCE {
            return Err(SimError::Normalization {
                norm_sq,
                tolerance: FILE_NORM_TOLERANCE,
            });
        }
        state.normalize()
    }
}

/// Errors from loading a custom amplitude file.
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed amplitude file {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("invalid amplitude file {path}: {source}")]
    Invalid { path: String, source: SimError },
}

pub fn load_amplitude_file(path: &Path) -> Result<SignalState, LoadError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: shown.clone(),
        source,
    })?;
    let file: AmplitudeFile = serde_json::from_str(&text).map_err(|source| LoadError::Parse {
        path: shown.clone(),
        source,
    })?;
    file.into_state().map_err(|source| LoadError::Invalid {
        path: shown,
        source,
    })
}

/// Input state family used by the experiment drivers.
#[derive(Clone, Debug, PartialEq)]
pub enum InputPreset {
    /// Every `a_s = 2^{-n/2}`.
    Uniform,
    /// `(β|H⟩ + γ|V⟩)^{⊗n}`.
    Product { beta: C64, gamma: C64 },
    /// Dicke state with `weight` V photons.
    Dicke { weight: usize },
    /// Explicit state, fixed photon count and backend.
    Custom(SignalState),
}

impl InputPreset {
    /// Whether the preset is invariant under photon permutations (always true
    /// except for custom dense states).
    pub fn is_permutation_invariant(&self) -> bool {
        !matches!(self, InputPreset::Custom(SignalState::Dense(_)))
    }

    pub fn build(&self, n: usize, backend: Backend) -> SimResult<SignalState> {
        match self {
            InputPreset::Uniform => uniform_state(n, backend),
            InputPreset::Product { beta, gamma } => make_product_state(n, *beta, *gamma, backend),
            InputPreset::Dicke { weight } => {
                let d: SignalState = dicke_state(n, *weight)?.into();
                match backend {
                    Backend::Symmetric => Ok(d),
                    Backend::Dense => Ok(d.to_dense()?.into()),
                }
            }
            InputPreset::Custom(state) => {
                if state.n() != n {
                    return Err(SimError::Dimension {
                        expected: n,
                        found: state.n(),
                    });
                }
                Ok(state.clone())
            }
        }
    }
}
