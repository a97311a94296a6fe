//! CHSH tables: exact quantum predictions and Monte Carlo hidden-variable
//! models.

use serde::{Deserialize, Serialize};

use qmeas_core::subquantum::{
    chsh_value, hv_correlation_table_with, quantum_correlation_table, spin_direction, trajectory_correlation_with,
    ChshSettings, ContextualSphereModel, CorrelationTable, JointDistributionOracle, SphereModel, LOCAL_BOUND,
    LP_TOLERANCE,
};

use super::{optimal_angles, Slots};
use crate::exec::RayonExecutor;
use crate::formats::{schema, ObservableSpec, StateSpec};
use crate::output::{float, Anomaly, Report, Table};
use crate::RunError;

/// Standard errors of slack allowed before a Monte Carlo `S` counts as
/// exceeding the local bound.
pub const MC_SIGMAS: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshInputs {
    #[serde(default = "singlet")]
    pub state: StateSpec,
    #[serde(default)]
    pub settings: Option<Slots<ObservableSpec>>,
}

fn singlet() -> StateSpec {
    StateSpec::Preset("singlet".into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Local sphere model, instantaneous.
    Sphere,
    /// Context-dependent sampler reproducing the singlet correlations.
    Contextual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubquantumInputs {
    pub model: ModelKind,
    /// Measurement angles in the x-z plane.
    #[serde(default = "optimal_angles")]
    pub angles: Slots<f64>,
}

/// Everything a CHSH report row needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshSummary {
    pub table: CorrelationTable,
    pub s: f64,
    pub s_error: f64,
    pub within_local_bound: bool,
    pub lp_feasible: bool,
}

pub fn summarize(table: CorrelationTable) -> ChshSummary {
    let s = chsh_value(&table);
    let s_error = table.chsh_std_error();
    let slack = if table.std_errors.is_some() {
        MC_SIGMAS * s_error
    } else {
        LP_TOLERANCE
    };
    let lp_feasible = JointDistributionOracle::new().decide(&table).is_feasible();
    ChshSummary {
        within_local_bound: s <= LOCAL_BOUND + slack,
        s,
        s_error,
        lp_feasible,
        table,
    }
}

pub fn to_csv(summary: &ChshSummary) -> Vec<u8> {
    let mut t = Table::new(&["setting_pair", "E", "stderr"]);
    let t_ref = &summary.table;
    for (p, (a, b)) in t_ref.pairs.iter().enumerate() {
        let err = t_ref.std_errors.map_or(0.0, |s| s[p]);
        t.row(&[format!("{a}-{b}"), float(t_ref.correlation(p)), float(err)]);
    }
    t.row(&["S".to_string(), float(summary.s), float(summary.s_error)]);
    let check = if summary.within_local_bound { "holds" } else { "violated" };
    t.row(&["S_bound_check", check, ""]);
    t.row(&["lp_feasible", if summary.lp_feasible { "true" } else { "false" }, ""]);
    t.into_bytes()
}

pub fn quantum_summary(inputs: &ChshInputs) -> Result<ChshSummary, RunError> {
    let state = inputs.state.build()?;
    let settings = match &inputs.settings {
        Some(slots) => slots.try_map(ObservableSpec::build_pvm)?.to_settings(),
        None => optimal_angles().try_map(|&t| ObservableSpec::SpinAngle { spin_angle: t }.build_pvm())?.to_settings(),
    };
    Ok(summarize(quantum_correlation_table(&state, &settings).map_err(schema)?))
}

pub fn run_quantum(inputs: &ChshInputs) -> Result<Report, RunError> {
    let summary = quantum_summary(inputs)?;
    Ok(Report {
        body: to_csv(&summary),
        anomalies: Vec::new(),
    })
}

pub fn subquantum_summary(
    inputs: &SubquantumInputs,
    samples: u64,
    seed: u64,
    exec: &RayonExecutor,
) -> Result<ChshSummary, RunError> {
    let directions: ChshSettings<[f64; 3]> = inputs.angles.to_settings().map(|&t| spin_direction(t));
    let labels = ChshSettings::default_labels();
    let table = match inputs.model {
        ModelKind::Sphere => {
            hv_correlation_table_with(exec, &SphereModel::local_singlet(&directions), &labels, samples, seed)
        }
        ModelKind::Contextual => {
            trajectory_correlation_with(exec, &ContextualSphereModel::new(&directions), &labels, samples, seed)
        }
    }
    .map_err(schema)?;
    Ok(summarize(table))
}

pub fn run_subquantum(
    inputs: &SubquantumInputs,
    samples: u64,
    seed: u64,
    exec: &RayonExecutor,
) -> Result<Report, RunError> {
    let summary = subquantum_summary(inputs, samples, seed, exec)?;
    let mut anomalies = Vec::new();
    if inputs.model == ModelKind::Sphere {
        if !summary.within_local_bound {
            anomalies.push(Anomaly::new(
                "local_bound",
                format!(
                    "S = {} exceeds {} by more than {MC_SIGMAS} standard errors ({})",
                    float(summary.s),
                    LOCAL_BOUND,
                    float(summary.s_error)
                ),
            ));
        }
        if !summary.lp_feasible {
            anomalies.push(Anomaly::new("joint_distribution", "sampled table has no joint distribution"));
        }
    }
    Ok(Report {
        body: to_csv(&summary),
        anomalies,
    })
}
