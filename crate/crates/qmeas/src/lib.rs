//! Command-line driver for `qmeas-core`.
//!
//! Reads a JSON run configuration, runs one experiment with a rayon-backed
//! Monte Carlo executor, and writes the report atomically next to a manifest
//! that is itself a valid configuration for an identical rerun.

use std::path::{Path, PathBuf};
use std::time::Instant;

pub mod config;
pub mod exec;
pub mod experiments;
pub mod formats;
pub mod output;

pub use config::{Experiment, Overrides, ResolvedConfig};
pub use exec::RayonExecutor;
pub use output::Anomaly;

use output::{anomaly_path, json_bytes, manifest_path, write_atomic, AnomalyReport, Manifest};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Schema(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O failure on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Schema(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io { .. } => 4,
        }
    }
}

/// Result of a run whose report was written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub output: PathBuf,
    pub manifest: PathBuf,
    pub anomalies: Vec<Anomaly>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.anomalies.is_empty() {
            0
        } else {
            3
        }
    }
}

pub fn load_config(path: &Path, experiment: Experiment, overrides: &Overrides) -> Result<ResolvedConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    config::parse_config(&text)?.resolve(experiment, overrides)
}

/// Runs `config` and writes the report, the manifest and, if anything went
/// wrong numerically, an anomaly report. Configuration errors are raised
/// before any file is touched.
pub fn execute(config: &ResolvedConfig) -> Result<Outcome, RunError> {
    let started = Instant::now();
    let exec = RayonExecutor::from_env()?;
    let report = match experiments::run(config, &exec) {
        Ok(r) => r,
        Err(RunError::Numerical(detail)) => {
            let anomalies = [Anomaly::new("computation", detail.clone())];
            write_anomalies(config, &anomalies)?;
            return Err(RunError::Numerical(detail));
        }
        Err(e) => return Err(e),
    };
    write_atomic(&config.output, &report.body)?;
    if !report.anomalies.is_empty() {
        write_anomalies(config, &report.anomalies)?;
    }
    let manifest = Manifest {
        toolkit: "qmeas",
        version: env!("CARGO_PKG_VERSION"),
        config,
        threads: exec.threads(),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        anomalies: &report.anomalies,
    };
    let manifest_file = manifest_path(&config.output);
    write_atomic(&manifest_file, &json_bytes(&manifest))?;
    Ok(Outcome {
        output: config.output.clone(),
        manifest: manifest_file,
        anomalies: report.anomalies,
    })
}

fn write_anomalies(config: &ResolvedConfig, anomalies: &[Anomaly]) -> Result<(), RunError> {
    let report = AnomalyReport {
        experiment: config.experiment.name(),
        output: &config.output,
        anomalies,
    };
    write_atomic(&anomaly_path(&config.output), &json_bytes(&report))
}
