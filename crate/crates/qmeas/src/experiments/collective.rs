//! Homogeneity of outcome sequences under selection rules.

use serde::{Deserialize, Serialize};

use qmeas_core::collectives::{
    generate_epr_sequences_with, generate_proper_mixture_with, homogeneity_test, HistoryRule, HomogeneityReport,
    LabelRule, OutcomeSequence, SelectionRule,
};
use qmeas_core::states::density_from_pure;

use crate::exec::RayonExecutor;
use crate::formats::{schema, ObservableSpec, StateSpec};
use crate::output::{float, Report, Table};
use crate::RunError;

fn default_alpha() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectiveInputs {
    pub scenario: Scenario,
    pub rules: Vec<RuleSpec>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Particle {
    First,
    #[default]
    Second,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preparation {
    pub weight: f64,
    pub state: StateSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Scenario {
    /// Coincidence measurements on pairs; the analysed particle's sequence
    /// carries its partner's outcomes as the side channel.
    Epr {
        state: StateSpec,
        first: ObservableSpec,
        second: ObservableSpec,
        #[serde(default)]
        analyse: Particle,
    },
    /// Each element prepared in one of several states, the preparation
    /// index recorded as the side channel.
    ProperMixture {
        preparations: Vec<Preparation>,
        observable: ObservableSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum RuleSpec {
    Every {
        every: usize,
        #[serde(default)]
        offset: usize,
    },
    PreviousValue {
        previous_value: usize,
    },
    PreviousValues {
        previous_values: Vec<usize>,
    },
    Label {
        label: usize,
    },
    Labels {
        labels: Vec<usize>,
    },
}

impl RuleSpec {
    pub fn build(&self) -> SelectionRule {
        match self {
            Self::Every { every, offset } => SelectionRule::every(*every, *offset),
            Self::PreviousValue { previous_value } => SelectionRule::previous_value_is(*previous_value),
            Self::PreviousValues { previous_values } => {
                SelectionRule::History(HistoryRule::PreviousValuesAre(previous_values.clone()))
            }
            Self::Label { label } => SelectionRule::label_is(*label),
            Self::Labels { labels } => SelectionRule::SideChannel(LabelRule::In(labels.clone())),
        }
    }
}

/// The sequence under test and the labels of its outcomes.
pub fn generate(
    scenario: &Scenario,
    samples: u64,
    seed: u64,
    exec: &RayonExecutor,
) -> Result<(OutcomeSequence, Vec<String>), RunError> {
    match scenario {
        Scenario::Epr {
            state,
            first,
            second,
            analyse,
        } => {
            let (first, second) = (first.build_pvm()?, second.build_pvm()?);
            let (s1, s2) =
                generate_epr_sequences_with(exec, &state.build()?, &first, &second, samples, seed).map_err(schema)?;
            Ok(match analyse {
                Particle::First => (s1, first.labels().to_vec()),
                Particle::Second => (s2, second.labels().to_vec()),
            })
        }
        Scenario::ProperMixture {
            preparations,
            observable,
        } => {
            let povm = observable.build_povm()?;
            let preps = preparations
                .iter()
                .map(|p| {
                    if !(p.weight.is_finite() && p.weight >= 0.0) {
                        return Err(RunError::Schema("preparation weights must be non-negative".into()));
                    }
                    Ok((p.weight, density_from_pure(&p.state.build()?)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if preps.iter().all(|(w, _)| *w == 0.0) {
                return Err(RunError::Schema("preparation weights must not all vanish".into()));
            }
            let seq = generate_proper_mixture_with(exec, &preps, &povm, samples, seed).map_err(schema)?;
            Ok((seq, povm.labels().to_vec()))
        }
    }
}

pub fn compute(
    inputs: &CollectiveInputs,
    samples: u64,
    seed: u64,
    exec: &RayonExecutor,
) -> Result<(HomogeneityReport, Vec<String>), RunError> {
    let (seq, labels) = generate(&inputs.scenario, samples, seed, exec)?;
    let rules: Vec<SelectionRule> = inputs.rules.iter().map(RuleSpec::build).collect();
    let report = homogeneity_test(&seq, &rules, inputs.alpha).map_err(schema)?;
    Ok((report, labels))
}

pub fn to_csv(report: &HomogeneityReport, labels: &[String]) -> Vec<u8> {
    let mut t = Table::new(&["rule", "outcome", "freq_full", "freq_sub", "z", "verdict"]);
    for rule in &report.rules {
        for o in &rule.outcomes {
            t.row(&[
                rule.rule.clone(),
                labels[o.outcome].clone(),
                float(o.freq_full),
                float(o.freq_sub),
                float(o.z),
                rule.verdict.as_str().to_string(),
            ]);
        }
    }
    t.into_bytes()
}

pub fn run(inputs: &CollectiveInputs, samples: u64, seed: u64, exec: &RayonExecutor) -> Result<Report, RunError> {
    let (report, labels) = compute(inputs, samples, seed, exec)?;
    Ok(Report {
        body: to_csv(&report, &labels),
        anomalies: Vec::new(),
    })
}
