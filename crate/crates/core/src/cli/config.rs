//! Run configuration: flags and JSON config files share one key set.
//!
//! Every key may come from `--config file.json`, from a flag, or both (flags
//! win). `n`, `alpha` and `theta` accept a single value or a list; only
//! `sweep` uses lists.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize};

use super::CliError;
use crate::circuit::CircuitParams;
use crate::input::{load_amplitude_file, InputPreset, LoadError};
use crate::state::{Backend, SignalState};

pub const DEFAULT_N: usize = 4;
/// Demonstration defaults, chosen so that αθ² = 1 and misclassification is visible.
pub const DEFAULT_ALPHA: f64 = 1e4;
pub const DEFAULT_THETA: f64 = 0.01;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_POINTS: usize = 2001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Uniform,
    Product,
    Dicke,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendChoice {
    Dense,
    Symmetric,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

fn one_or_many<'de, D, T>(d: D) -> Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match OneOrMany::<T>::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

/// Raw, unvalidated configuration as given on the command line or in a file.
#[derive(Clone, Debug, Default, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ConfigArgs {
    /// JSON config file; flags override its entries.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Photon count (comma-separated list for sweep).
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub n: Vec<usize>,
    /// Probe coherent amplitude α (comma-separated list for sweep).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(default, deserialize_with = "one_or_many")]
    pub alpha: Vec<f64>,
    /// Kerr phase θ in radians (comma-separated list for sweep).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(default, deserialize_with = "one_or_many")]
    pub theta: Vec<f64>,
    /// Input preset.
    #[arg(long, value_enum)]
    pub input: Option<InputKind>,
    /// H amplitude of each photon for the product preset.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// V amplitude magnitude of each photon for the product preset.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Phase of the V amplitude (radians) for the product preset.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_phase: Option<f64>,
    /// V-photon count for the dicke preset.
    #[arg(long)]
    pub weight: Option<usize>,
    /// Amplitude file for the custom preset.
    #[arg(long)]
    pub amplitudes_file: Option<PathBuf>,
    /// State storage; `auto` uses the symmetric form unless the input is a dense custom file.
    #[arg(long, value_enum)]
    pub backend: Option<BackendChoice>,
    /// Monte Carlo trial count.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed; trial i draws from its own substream.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Report format (json for simulate/analyze, csv for sweep by default).
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Lower end of the sample-distribution grid.
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    /// Upper end of the sample-distribution grid.
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    /// Number of sample-distribution grid points.
    #[arg(long)]
    pub points: Option<usize>,
}

impl ConfigArgs {
    /// Loads `--config` (if any) and overlays the flags on it.
    pub fn merged(&self) -> Result<ConfigArgs, CliError> {
        let Some(path) = &self.config else {
            return Ok(self.clone());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let mut base: ConfigArgs = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("malformed config {}: {e}", path.display())))?;
        // relative paths inside the file are resolved against the file's directory
        if let (Some(f), Some(dir)) = (&base.amplitudes_file, path.parent()) {
            if f.is_relative() {
                base.amplitudes_file = Some(dir.join(f));
            }
        }
        macro_rules! overlay {
            ($($field:ident),*) => { $( if self.$field.is_some() { base.$field = self.$field.clone(); } )* };
        }
        macro_rules! overlay_list {
            ($($field:ident),*) => { $( if !self.$field.is_empty() { base.$field = self.$field.clone(); } )* };
        }
        overlay!(
            input,
            beta,
            gamma,
            gamma_phase,
            weight,
            amplitudes_file,
            backend,
            trials,
            seed,
            output,
            format,
            x_min,
            x_max,
            points
        );
        overlay_list!(n, alpha, theta);
        base.config = None;
        Ok(base)
    }
}

/// How the input state was specified, echoed into every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputSpec {
    pub input: InputKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_phase: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes_file: Option<String>,
}

/// Fully resolved configuration for single-point commands.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub alpha: f64,
    pub theta: f64,
    #[serde(flatten)]
    pub input: InputSpec,
    pub backend: Backend,
    pub trials: u64,
    pub seed: u64,
    pub output: Option<String>,
    pub format: OutputFormat,
}

/// Fully resolved configuration for `sweep`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub n: Vec<usize>,
    pub alpha: Vec<f64>,
    pub theta: Vec<f64>,
    #[serde(flatten)]
    pub input: InputSpec,
    pub backend: BackendChoice,
    pub output: Option<String>,
    pub format: OutputFormat,
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn load_custom(path: &Path) -> Result<SignalState, CliError> {
    load_amplitude_file(path).map_err(|e| match e {
        LoadError::Io { .. } => CliError::Io(e.to_string()),
        _ => CliError::Config(e.to_string()),
    })
}

/// Builds the input preset and its echo record.
pub fn resolve_input(args: &ConfigArgs) -> Result<(InputPreset, InputSpec), CliError> {
    let kind = args.input.unwrap_or(InputKind::Uniform);
    let mut spec = InputSpec {
        input: kind,
        beta: None,
        gamma: None,
        gamma_phase: None,
        weight: None,
        amplitudes_file: None,
    };
    let preset = match kind {
        InputKind::Uniform => InputPreset::Uniform,
        InputKind::Product => {
            let (Some(beta), Some(gamma)) = (args.beta, args.gamma) else {
                return Err(config_err("product input needs --beta and --gamma"));
            };
            let phase = args.gamma_phase.unwrap_or(0.0);
            spec.beta = Some(beta);
            spec.gamma = Some(gamma);
            spec.gamma_phase = Some(phase);
            InputPreset::Product {
                beta: C64::new(beta, 0.0),
                gamma: C64::from_polar(gamma, phase),
            }
        }
        InputKind::Dicke => {
            let weight = args
                .weight
                .ok_or_else(|| config_err("dicke input needs --weight"))?;
            spec.weight = Some(weight);
            InputPreset::Dicke { weight }
        }
        InputKind::Custom => {
            let path = args
                .amplitudes_file
                .as_ref()
                .ok_or_else(|| config_err("custom input needs --amplitudes-file"))?;
            spec.amplitudes_file = Some(path.display().to_string());
            InputPreset::Custom(load_custom(path)?)
        }
    };
    Ok((preset, spec))
}

/// Picks the storage backend for a preset.
///
/// `auto` uses the symmetric form for every permutation-invariant preset and
/// the custom file's own layout otherwise.
pub fn resolve_backend(
    choice: BackendChoice,
    preset: &InputPreset,
    n: usize,
) -> Result<Backend, CliError> {
    if let InputPreset::Custom(state) = preset {
        return match choice {
            BackendChoice::Auto => Ok(state.backend()),
            c if backend_of(c) == state.backend() => Ok(state.backend()),
            _ => Err(config_err(format!(
                "--backend conflicts with the {} layout of the amplitude file",
                state.backend().name()
            ))),
        };
    }
    let backend = match choice {
        BackendChoice::Auto => Backend::Symmetric,
        c => backend_of(c),
    };
    if n > backend.cap() {
        return Err(config_err(format!(
            "n = {n} exceeds the {} backend cap of {}",
            backend.name(),
            backend.cap()
        )));
    }
    Ok(backend)
}

fn backend_of(c: BackendChoice) -> Backend {
    match c {
        BackendChoice::Dense => Backend::Dense,
        _ => Backend::Symmetric,
    }
}

fn single<T: Copy>(values: &[T], default: T, name: &str) -> Result<T, CliError> {
    match values {
        [] => Ok(default),
        [v] => Ok(*v),
        _ => Err(config_err(format!(
            "--{name} takes a single value for this command"
        ))),
    }
}

/// Validated single-point configuration with the circuit parameters and input state it describes.
pub struct Resolved {
    pub config: RunConfig,
    pub params: CircuitParams,
    pub input: SignalState,
}

pub fn resolve_run(args: &ConfigArgs) -> Result<Resolved, CliError> {
    let args = args.merged()?;
    let (preset, spec) = resolve_input(&args)?;
    let default_n = match &preset {
        InputPreset::Custom(s) => s.n(),
        _ => DEFAULT_N,
    };
    let n = single(&args.n, default_n, "n")?;
    let alpha = single(&args.alpha, DEFAULT_ALPHA, "alpha")?;
    let theta = single(&args.theta, DEFAULT_THETA, "theta")?;
    let params = CircuitParams::new(n, alpha, theta).map_err(config_err)?;
    let backend = resolve_backend(args.backend.unwrap_or(BackendChoice::Auto), &preset, n)?;
    let input = preset.build(n, backend).map_err(config_err)?;
    let trials = args.trials.unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(config_err("--trials must be at least 1"));
    }
    let config = RunConfig {
        n,
        alpha,
        theta,
        input: spec,
        backend,
        trials,
        seed: args.seed.unwrap_or(0),
        output: args.output.as_ref().map(|p| p.display().to_string()),
        format: args.format.unwrap_or(OutputFormat::Json),
    };
    Ok(Resolved {
        config,
        params,
        input,
    })
}

pub fn resolve_sweep(args: &ConfigArgs) -> Result<(SweepConfig, InputPreset), CliError> {
    let args = args.merged()?;
    let (preset, spec) = resolve_input(&args)?;
    let or_default = |v: &Vec<f64>, d: f64| if v.is_empty() { vec![d] } else { v.clone() };
    let n = if args.n.is_empty() {
        vec![DEFAULT_N]
    } else {
        args.n.clone()
    };
    let config = SweepConfig {
        n,
        alpha: or_default(&args.alpha, DEFAULT_ALPHA),
        theta: or_default(&args.theta, DEFAULT_THETA),
        input: spec,
        backend: args.backend.unwrap_or(BackendChoice::Auto),
        output: args.output.as_ref().map(|p| p.display().to_string()),
        format: args.format.unwrap_or(OutputFormat::Csv),
    };
    Ok((config, preset))
}
