//! Joint and conditional statistics of a bipartite pure state.

use serde::{Deserialize, Serialize};

use qmeas_core::epr::{
    conditional_probability, conditionally_prepared_state, contextual_state, joint_probability,
    two_particle_contextual_state, EPRScenario, EprError,
};
use qmeas_core::states::{density_from_pure, reduce};
use qmeas_core::Subsystem;

use crate::formats::{matrix_to_json, schema, MatrixJson, ObservableSpec, StateSpec};
use crate::output::{json_bytes, Report};
use crate::RunError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EprInputs {
    pub state: StateSpec,
    pub first: ObservableSpec,
    pub second: ObservableSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conditioning {
    pub outcome: String,
    pub probability: f64,
    /// `p(b | a)`, absent when `p(a)` vanishes.
    pub second_given_first: Option<Vec<f64>>,
    pub prepared_state: Option<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EprReport {
    pub dims: [usize; 2],
    pub first_labels: Vec<String>,
    pub second_labels: Vec<String>,
    pub joint: Vec<Vec<f64>>,
    pub first_marginal: Vec<f64>,
    pub second_marginal: Vec<f64>,
    pub conditionals: Vec<Conditioning>,
    pub reduced_second: MatrixJson,
    pub contextual_second: MatrixJson,
    pub two_particle_contextual: MatrixJson,
}

pub fn compute(inputs: &EprInputs) -> Result<EprReport, RunError> {
    let state = inputs.state.build()?;
    let first = inputs.first.build_pvm()?;
    let second = inputs.second.build_pvm()?;
    let scenario = EPRScenario::new(state.clone(), first.clone(), second.clone()).map_err(schema)?;
    let (d1, d2) = scenario.dims();
    let grid = joint_probability(&scenario).map_err(numerical)?;
    let first_marginal = grid.row_marginal();

    let mut conditionals = Vec::with_capacity(first.len());
    for (i, label) in first.labels().iter().enumerate() {
        let (given, prepared) = match conditional_probability(&grid, i) {
            Ok(p) => {
                let rho = conditionally_prepared_state(&state, &first, i).map_err(numerical)?;
                (Some(p), Some(matrix_to_json(rho.matrix())))
            }
            Err(EprError::ZeroProbability { .. }) => (None, None),
            Err(e) => return Err(numerical(e)),
        };
        conditionals.push(Conditioning {
            outcome: label.clone(),
            probability: first_marginal[i],
            second_given_first: given,
            prepared_state: prepared,
        });
    }

    let reduced = reduce(&density_from_pure(&state), (d1, d2), Subsystem::Second).map_err(numerical)?;
    let contextual = contextual_state(&reduced, &second).map_err(numerical)?;
    let pair = two_particle_contextual_state(&state, &first, &second).map_err(numerical)?;
    Ok(EprReport {
        dims: [d1, d2],
        first_labels: first.labels().to_vec(),
        second_labels: second.labels().to_vec(),
        first_marginal,
        second_marginal: grid.col_marginal(),
        joint: grid.probabilities,
        conditionals,
        reduced_second: matrix_to_json(reduced.matrix()),
        contextual_second: matrix_to_json(contextual.matrix()),
        two_particle_contextual: matrix_to_json(pair.matrix()),
    })
}

pub fn run(inputs: &EprInputs) -> Result<Report, RunError> {
    Ok(Report {
        body: json_bytes(&compute(inputs)?),
        anomalies: Vec::new(),
    })
}

fn numerical<E: std::fmt::Display>(e: E) -> RunError {
    RunError::Numerical(e.to_string())
}
