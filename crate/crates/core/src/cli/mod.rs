//! The `kerrsim` command line: `simulate`, `analyze`, `sample-distribution`
//! and `sweep`.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for I/O failures.
//! Failures also print a one-line JSON error record on stderr.

pub mod config;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{
    error_report, error_report_csv, run_monte_carlo, sweep, sweep_csv, MonteCarloReport, SweepPoint,
};
use crate::circuit::kerr_evolve;
use crate::homodyne::{classify, marginal_pdf};
use config::{
    resolve_backend, resolve_run, resolve_sweep, ConfigArgs, OutputFormat, DEFAULT_POINTS,
};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
        }
    }

    /// Machine-readable error line.
    pub fn record(&self) -> String {
        serde_json::json!({
            "error": { "kind": self.kind(), "message": self.to_string() },
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "kerrsim",
    version,
    about = "Weak cross-Kerr multiphoton entangler simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo run of the full measure-and-correct pipeline.
    Simulate(ConfigArgs),
    /// Closed-form error probabilities and outcome probabilities.
    Analyze(ConfigArgs),
    /// Homodyne density and outcome label on an x grid (CSV).
    SampleDistribution(ConfigArgs),
    /// Error table over a grid of (n, alpha, theta).
    Sweep(ConfigArgs),
}

/// Rendered output of a command and where it goes.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub body: String,
    pub path: Option<String>,
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    schema_version: u32,
    artifact_version: &'static str,
    command: &'static str,
    config: &'a C,
    report: R,
}

fn envelope<C: Serialize, R: Serialize>(command: &'static str, config: &C, report: R) -> String {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        artifact_version: ARTIFACT_VERSION,
        command,
        config,
        report,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
    s.push('\n');
    s
}

fn sim_err(e: crate::SimError) -> CliError {
    CliError::Config(e.to_string())
}

pub fn cmd_simulate(args: &ConfigArgs) -> Result<Output, CliError> {
    let r = resolve_run(args)?;
    let report =
        run_monte_carlo(&r.params, &r.input, r.config.trials, r.config.seed).map_err(sim_err)?;
    let body = match r.config.format {
        OutputFormat::Json => envelope("simulate", &r.config, &report),
        OutputFormat::Csv => simulate_csv(&report),
    };
    Ok(Output {
        body,
        path: r.config.output.clone(),
    })
}

/// Header of the `simulate` CSV form.
pub const SIMULATE_CSV_HEADER: [&str; 8] = [
    "t",
    "count",
    "trials",
    "seed",
    "misclassified",
    "empirical_misclassification",
    "confidence_radius",
    "mean_output_fidelity",
];

fn simulate_csv(report: &MonteCarloReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SIMULATE_CSV_HEADER)
        .expect("in-memory write");
    for (t, count) in &report.per_outcome_counts {
        w.write_record([
            t.to_string(),
            count.to_string(),
            report.trials.to_string(),
            report.seed.to_string(),
            report.misclassified.to_string(),
            report.empirical_misclassification.to_string(),
            report.confidence_radius.to_string(),
            report.mean_output_fidelity.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn cmd_analyze(args: &ConfigArgs) -> Result<Output, CliError> {
    let r = resolve_run(args)?;
    let report = error_report(&r.params, &r.input).map_err(sim_err)?;
    let body = match r.config.format {
        OutputFormat::Json => envelope("analyze", &r.config, &report),
        OutputFormat::Csv => error_report_csv(&report),
    };
    Ok(Output {
        body,
        path: r.config.output.clone(),
    })
}

/// Header of the `sample-distribution` CSV.
pub const DISTRIBUTION_CSV_HEADER: [&str; 3] = ["x", "pdf", "outcome_t"];

pub fn cmd_sample_distribution(args: &ConfigArgs) -> Result<Output, CliError> {
    let merged = args.merged()?;
    let r = resolve_run(&merged)?;
    if r.config.format != OutputFormat::Csv && merged.format.is_some() {
        return Err(CliError::Config(
            "sample-distribution only writes CSV".into(),
        ));
    }
    let joint = kerr_evolve(&r.params, &r.input).map_err(sim_err)?;
    let centres: Vec<f64> = joint
        .classes()
        .iter()
        .map(|c| r.params.peak(c.outcome(r.params.n())))
        .collect();
    let lo_default = centres.iter().copied().fold(f64::INFINITY, f64::min) - 8.0;
    let hi_default = centres.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 8.0;
    let x_min = merged.x_min.unwrap_or(lo_default);
    let x_max = merged.x_max.unwrap_or(hi_default);
    let points = merged.points.unwrap_or(DEFAULT_POINTS);
    if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max || points < 2 {
        return Err(CliError::Config(format!(
            "degenerate grid: x_min = {x_min}, x_max = {x_max}, points = {points}"
        )));
    }
    let step = (x_max - x_min) / (points - 1) as f64;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(DISTRIBUTION_CSV_HEADER)
        .expect("in-memory write");
    for i in 0..points {
        let x = if i + 1 == points {
            x_max
        } else {
            x_min + i as f64 * step
        };
        w.write_record([
            x.to_string(),
            marginal_pdf(&joint, x).to_string(),
            classify(&r.params, x).to_string(),
        ])
        .expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8");
    Ok(Output {
        body,
        path: r.config.output.clone(),
    })
}

pub fn cmd_sweep(args: &ConfigArgs) -> Result<Output, CliError> {
    let (config, preset) = resolve_sweep(args)?;
    let backend = resolve_backend(config.backend, &preset, 0)?;
    let mut points = Vec::new();
    for &n in &config.n {
        for &alpha in &config.alpha {
            for &theta in &config.theta {
                points.push(SweepPoint { n, alpha, theta });
            }
        }
    }
    let rows = sweep(&points, &preset, backend);
    let body = match config.format {
        OutputFormat::Csv => sweep_csv(&rows),
        OutputFormat::Json => envelope("sweep", &config, &rows),
    };
    Ok(Output {
        body,
        path: config.output.clone(),
    })
}

/// Runs one parsed command and returns its rendered output.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::SampleDistribution(a) => cmd_sample_distribution(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

/// Writes `output` to its file or to stdout.
pub fn emit(output: &Output) -> Result<(), CliError> {
    match &output.path {
        Some(p) => std::fs::write(p, &output.body)
            .map_err(|e| CliError::Io(format!("cannot write {p}: {e}"))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(output.body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("cannot write stdout: {e}")))
        }
    }
}

/// Full CLI entry point; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        // help and version requests
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let err = CliError::Config(e.render().to_string().trim_end().to_string());
            eprintln!("{}", err.record());
            return err.exit_code();
        }
    };
    match execute(&cli).and_then(|o| emit(&o)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.record());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use config::RunConfig;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("kerrsim").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn error_records_are_json() {
        let e = CliError::Config("bad".into());
        let v: serde_json::Value = serde_json::from_str(&e.record()).unwrap();
        assert_eq!(v["exit_code"], 2);
        assert_eq!(v["error"]["kind"], "config");
        assert_eq!(CliError::Io("x".into()).exit_code(), 3);
    }

    #[test]
    fn parses_lists_and_negative_numbers() {
        let cli = parse(&["sweep", "--n", "4,6", "--theta", "0.01,0.02"]);
        let Command::Sweep(a) = cli.command else {
            panic!()
        };
        assert_eq!(a.n, vec![4, 6]);
        assert_eq!(a.theta, vec![0.01, 0.02]);
        let cli = parse(&["sample-distribution", "--x-min", "-5", "--x-max", "5"]);
        let Command::SampleDistribution(a) = cli.command else {
            panic!()
        };
        assert_eq!(a.x_min, Some(-5.0));
    }

    #[test]
    fn single_point_commands_reject_lists() {
        let cli = parse(&["analyze", "--n", "4,6"]);
        assert!(matches!(execute(&cli), Err(CliError::Config(_))));
    }

    #[test]
    fn config_violations_are_config_errors() {
        for args in [
            &["analyze", "--theta", "0.5"][..],
            &["analyze", "--n", "30", "--backend", "dense"],
            &["analyze", "--input", "product", "--beta", "0.6"],
            &["analyze", "--input", "dicke", "--weight", "9"],
            &["simulate", "--trials", "0"],
            &["sample-distribution", "--x-min", "3", "--x-max", "1"],
            &["sample-distribution", "--points", "1"],
        ] {
            let r = execute(&parse(args));
            assert!(matches!(r, Err(CliError::Config(_))), "{args:?} -> {r:?}");
        }
        let missing = execute(&parse(&[
            "analyze",
            "--input",
            "custom",
            "--amplitudes-file",
            "/nonexistent/a.json",
        ]));
        assert!(matches!(missing, Err(CliError::Io(_))));
    }

    #[test]
    fn report_embeds_config_and_version() {
        let out = execute(&parse(&["analyze", "--n", "8"])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.body).unwrap();
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(v["artifact_version"], ARTIFACT_VERSION);
        assert_eq!(v["config"]["n"], 8);
        assert_eq!(v["config"]["input"], "uniform");
        assert_eq!(v["report"]["per_outcome"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn run_config_serializes_flat() {
        let r = resolve_run(&ConfigArgs::default()).unwrap();
        let v = serde_json::to_value::<&RunConfig>(&r.config).unwrap();
        assert_eq!(v["backend"], "symmetric");
        assert_eq!(v["alpha"], 1e4);
    }
}
