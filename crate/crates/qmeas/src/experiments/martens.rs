//! Nonideality of a joint measurement against two target observables.

use serde::{Deserialize, Serialize};

use qmeas_core::joint_nonideal::{nonideality_report, JointError, MartensReport};

use crate::formats::{schema, BivariateSpec, ObservableSpec};
use crate::output::{float, Anomaly, Report, Table};
use crate::RunError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MartensInputs {
    pub grid: BivariateSpec,
    pub p: ObservableSpec,
    pub q: ObservableSpec,
}

pub fn compute(inputs: &MartensInputs) -> Result<MartensReport, RunError> {
    let r = inputs.grid.build()?;
    let p = inputs.p.build_povm()?;
    let q = inputs.q.build_povm()?;
    nonideality_report(&r, &p, &q).map_err(|e| match e {
        JointError::Infeasible { .. } | JointError::Linalg(_) => RunError::Numerical(e.to_string()),
        other => schema(other),
    })
}

pub fn run(inputs: &MartensInputs) -> Result<Report, RunError> {
    let report = compute(inputs)?;
    let mut table = Table::new(&["J_lambda", "J_mu", "bound", "margin"]);
    let opt = |x: Option<f64>| x.map(float).unwrap_or_default();
    table.row(&[float(report.j_lambda), float(report.j_mu), opt(report.bound), opt(report.margin())]);
    let mut anomalies = Vec::new();
    if report.satisfied() == Some(false) {
        anomalies.push(Anomaly::new(
            "martens",
            format!(
                "J_lambda + J_mu = {} is below the bound {}",
                float(report.j_sum()),
                opt(report.bound)
            ),
        ));
    }
    Ok(Report {
        body: table.into_bytes(),
        anomalies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(text: &str) -> MartensInputs {
        serde_json::from_str(text).unwrap()
    }

    #[test]
    fn symmetric_unsharp_pair() {
        let g = std::f64::consts::FRAC_1_SQRT_2;
        let text = format!(r#"{{"grid": {{"unsharp_spin": {{"gamma_z": {g}, "gamma_x": {g}}}}}, "p": "z", "q": "x"}}"#);
        let report = run(&inputs(&text)).unwrap();
        assert!(report.anomalies.is_empty());
        let csv = String::from_utf8(report.body).unwrap();
        let values: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert!((values[2] - 2f64.ln()).abs() < 1e-12);
        assert!((values[0] + values[1] - values[2] - values[3]).abs() < 1e-12);
    }

    #[test]
    fn povm_targets_leave_bound_empty() {
        let text = r#"{"grid": {"unsharp_spin": {"gamma_z": 0.5, "gamma_x": 0.5}}, "p": "z",
            "q": {"effects": [[[[0.5,0],[0.4,0]],[[0.4,0],[0.5,0]]], [[[0.5,0],[-0.4,0]],[[-0.4,0],[0.5,0]]]]}}"#;
        let csv = String::from_utf8(run(&inputs(text)).unwrap().body).unwrap();
        assert!(csv.lines().nth(1).unwrap().ends_with(",,"));
    }

    #[test]
    fn unreachable_marginal_is_numerical() {
        let text = r#"{"grid": {"unsharp_spin": {"gamma_z": 1, "gamma_x": 0}}, "p": "x", "q": "x"}"#;
        assert!(matches!(run(&inputs(text)), Err(RunError::Numerical(_))));
        let text = r#"{"grid": {"unsharp_spin": {"gamma_z": 1, "gamma_x": 0}}, "p": "z", "q": {"computational": 3}}"#;
        assert!(matches!(run(&inputs(text)), Err(RunError::Schema(_))));
    }
}
