//! One runner per experiment. Each validates its `inputs`, computes, and
//! returns the report body with any anomalies found on the way.

use serde::{Deserialize, Serialize};

use qmeas_core::subquantum::ChshSettings;

use crate::config::{Experiment, ResolvedConfig};
use crate::exec::RayonExecutor;
use crate::output::Report;
use crate::RunError;

pub mod chsh;
pub mod collective;
pub mod epr;
pub mod martens;

pub fn run(config: &ResolvedConfig, exec: &RayonExecutor) -> Result<Report, RunError> {
    match config.experiment {
        Experiment::Epr => epr::run(&config.inputs()?),
        Experiment::Martens => martens::run(&config.inputs()?),
        Experiment::Chsh => chsh::run_quantum(&config.inputs()?),
        Experiment::Subquantum => chsh::run_subquantum(&config.inputs()?, config.samples, config.seed, exec),
        Experiment::Collective => collective::run(&config.inputs()?, config.samples, config.seed, exec),
    }
}

/// The four CHSH slots as they appear in input files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slots<T> {
    pub a1: T,
    pub b1: T,
    pub a2: T,
    pub b2: T,
}

impl<T: Clone> Slots<T> {
    pub fn to_settings(&self) -> ChshSettings<T> {
        ChshSettings {
            a1: self.a1.clone(),
            b1: self.b1.clone(),
            a2: self.a2.clone(),
            b2: self.b2.clone(),
        }
    }

    pub fn try_map<U, E>(&self, mut f: impl FnMut(&T) -> Result<U, E>) -> Result<Slots<U>, E> {
        Ok(Slots {
            a1: f(&self.a1)?,
            b1: f(&self.b1)?,
            a2: f(&self.a2)?,
            b2: f(&self.b2)?,
        })
    }
}

pub fn optimal_angles() -> Slots<f64> {
    let s = ChshSettings::optimal_angles();
    Slots {
        a1: s.a1,
        b1: s.b1,
        a2: s.a2,
        b2: s.b2,
    }
}
