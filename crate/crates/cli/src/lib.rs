//! Experiment runner for `dissipde`.
//!
//! A run is: config text -> overrides and seed -> resolved config (defaults
//! filled, parameter rules enforced) -> experiment -> `report.json`,
//! `report.csv`, series CSVs and `manifest.toml`. The manifest holds the
//! resolved config, so [`replay`] reproduces a run byte for byte.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub mod config;
pub mod experiments;
pub mod report;

use config::{ConfigError, ExperimentConfig};
use report::{Output, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Simulate,
    Couple,
    Harnack,
    Gradient,
    Invariant,
    Ultrabound,
    YosidaTable,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Simulate,
        Experiment::Couple,
        Experiment::Harnack,
        Experiment::Gradient,
        Experiment::Invariant,
        Experiment::Ultrabound,
        Experiment::YosidaTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::Couple => "couple",
            Experiment::Harnack => "harnack",
            Experiment::Gradient => "gradient",
            Experiment::Invariant => "invariant",
            Experiment::Ultrabound => "ultrabound",
            Experiment::YosidaTable => "yosida-table",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("runtime error: {0}")]
    Runtime(#[from] dissipde::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("serialization error: {0}")]
    Toml(#[from] toml::ser::Error),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Process exit status: statistical failures and errors never share a code.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const ERROR: i32 = 1;
    pub const STATISTICAL_FAILURE: i32 = 2;
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: Experiment,
    pub version: String,
    pub config: ExperimentConfig,
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub out_dir: PathBuf,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.pass {
            exit::PASS
        } else {
            exit::STATISTICAL_FAILURE
        }
    }
}

/// Loads `source` (file or bundled name) and applies overrides and seed.
pub fn prepare(source: &str, overrides: &[String], seed: Option<u64>) -> Result<ExperimentConfig, ConfigError> {
    config::parse(&config::load_source(source)?, overrides, seed)
}

/// Resolves and runs one experiment. `workers = None` uses every core;
/// outputs do not depend on it.
pub fn run(experiment: Experiment, cfg: &ExperimentConfig, out_dir: &Path, workers: Option<usize>) -> Result<Outcome, CliError> {
    let resolved = cfg.resolve(experiment)?;
    for w in &resolved.warnings {
        eprintln!("WARNING: {w}");
    }
    let cfg = resolved.config;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.unwrap_or(0)).build()?;
    let mut out = Output::create(out_dir)?;
    let mut findings = pool.install(|| experiments::run(experiment, &cfg, &mut out))?;

    let mut warnings = resolved.warnings;
    warnings.append(&mut findings.warnings);
    let manifest = Manifest {
        experiment,
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
    };
    out.text("manifest.toml", &toml::to_string(&manifest)?)?;
    let mut files = out.files();
    files.extend(["report.csv".to_string(), "report.json".to_string()]);
    files.sort();
    let report = Report {
        experiment: experiment.name().to_string(),
        seed: cfg.seed,
        pass: findings.pass(),
        checks: findings.checks,
        sections: findings.sections,
        warnings,
        files,
        config: serde_json::to_value(&cfg)?,
    };
    out.text("report.csv", &report.csv())?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    out.text("report.json", &json)?;
    Ok(Outcome {
        report,
        out_dir: out_dir.to_path_buf(),
    })
}

pub fn read_manifest(path: &Path) -> Result<Manifest, CliError> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| ConfigError::new("manifest", e.to_string()).into())
}

/// Reruns the experiment recorded in a manifest.
pub fn replay(manifest: &Path, out_dir: &Path, workers: Option<usize>) -> Result<Outcome, CliError> {
    let m = read_manifest(manifest)?;
    run(m.experiment, &m.config, out_dir, workers)
}
