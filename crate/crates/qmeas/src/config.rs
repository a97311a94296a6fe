//! Run configuration files.
//!
//! ```json
//! { "seed": 7, "samples": 100000, "output": "chsh.csv", "inputs": { ... } }
//! ```
//!
//! Everything except `inputs` is optional and may be overridden on the
//! command line. A manifest written by a previous run is also accepted: its
//! `config` member is a fully resolved configuration.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::RunError;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SAMPLES: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Epr,
    Martens,
    Chsh,
    Subquantum,
    Collective,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Epr => "epr",
            Self::Martens => "martens",
            Self::Chsh => "chsh",
            Self::Subquantum => "subquantum",
            Self::Collective => "collective",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Self::Epr => "json",
            _ => "csv",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub inputs: serde_json::Value,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub output: Option<PathBuf>,
}

/// Configuration with every optional field filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolvedConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub samples: u64,
    pub output: PathBuf,
    pub inputs: serde_json::Value,
}

pub fn parse_config(text: &str) -> Result<ConfigFile, RunError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| RunError::Schema(format!("malformed JSON: {e}")))?;
    let value = match value {
        serde_json::Value::Object(mut map) if map.contains_key("toolkit") => map
            .remove("config")
            .ok_or_else(|| RunError::Schema("manifest has no `config` member".into()))?,
        other => other,
    };
    serde_json::from_value(value).map_err(|e| RunError::Schema(e.to_string()))
}

impl ConfigFile {
    pub fn resolve(self, experiment: Experiment, overrides: &Overrides) -> Result<ResolvedConfig, RunError> {
        if let Some(e) = self.experiment {
            if e != experiment {
                return Err(RunError::Schema(format!(
                    "configuration is for `{e}` but `{experiment}` was requested"
                )));
            }
        }
        let samples = overrides.samples.or(self.samples).unwrap_or(DEFAULT_SAMPLES);
        if samples == 0 {
            return Err(RunError::Schema("samples must be positive".into()));
        }
        Ok(ResolvedConfig {
            experiment,
            seed: overrides.seed.or(self.seed).unwrap_or(DEFAULT_SEED),
            samples,
            output: overrides
                .output
                .clone()
                .or(self.output)
                .unwrap_or_else(|| PathBuf::from(format!("qmeas-{}.{}", experiment.name(), experiment.extension()))),
            inputs: self.inputs,
        })
    }
}

impl ResolvedConfig {
    pub fn inputs<T: serde::de::DeserializeOwned>(&self) -> Result<T, RunError> {
        serde_json::from_value(self.inputs.clone()).map_err(|e| RunError::Schema(format!("inputs: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_win() {
        let cfg = parse_config(r#"{"seed": 3, "samples": 10, "inputs": {}}"#).unwrap();
        let r = cfg
            .clone()
            .resolve(Experiment::Chsh, &Overrides { seed: Some(5), ..Default::default() })
            .unwrap();
        assert_eq!((r.seed, r.samples), (5, 10));
        assert_eq!(r.output, PathBuf::from("qmeas-chsh.csv"));
        let r = cfg.resolve(Experiment::Epr, &Overrides::default()).unwrap();
        assert_eq!(r.output, PathBuf::from("qmeas-epr.json"));
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(parse_config("{\"inputs\": "), Err(RunError::Schema(_))));
        assert!(matches!(parse_config(r#"{"inputs": {}, "sede": 1}"#), Err(RunError::Schema(_))));
        assert!(matches!(parse_config(r#"{"seed": 1}"#), Err(RunError::Schema(_))));
        let cfg = parse_config(r#"{"experiment": "epr", "inputs": {}}"#).unwrap();
        assert!(cfg.resolve(Experiment::Chsh, &Overrides::default()).is_err());
    }

    #[test]
    fn manifest_is_a_config() {
        let text = r#"{"toolkit": "qmeas", "config": {"experiment": "chsh", "seed": 1, "samples": 2, "output": "x.csv", "inputs": {}}}"#;
        let r = parse_config(text).unwrap().resolve(Experiment::Chsh, &Overrides::default()).unwrap();
        assert_eq!(r.output, PathBuf::from("x.csv"));
        assert_eq!((r.seed, r.samples), (1, 2));
    }
}
