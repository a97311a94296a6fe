//! Outcome sequences, place selection and homogeneity of relative
//! frequencies.
//!
//! A [`SelectionRule`] decides whether to keep position `n` by looking at a
//! [`PriorView`]: the index `n`, the values strictly before `n`, the
//! side-channel labels before `n` and the label at `n`. The view has no access
//! path to `values[n]`, so every rule is outcome-blind by construction.
//!
//! [`homogeneity_test`] compares each selected subsequence with its
//! complement through a two-proportion z-test per outcome, using the
//! full-sequence frequency as the pooled proportion, and applies a Bonferroni
//! correction across rules and outcomes.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::epr::{joint_probability_parts, EprError};
use crate::montecarlo::{ChunkExecutor, MonteCarloPlan, Sequential};
use crate::observables::{draw_index, probabilities, DiscretePOVM, DiscretePVM, ObservableError};
use crate::states::{DensityOperator, StateVector};
use crate::stats::normal_quantile;

/// Each outcome present in a tested sequence needs at least this many
/// occurrences.
pub const MIN_OUTCOME_COUNT: usize = 30;

/// Partner-outcome rules whose label correlates with the value beyond this
/// are reported as degenerate.
pub const DEGENERACY_CORRELATION: f64 = 0.999;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CollectiveError {
    #[error("side channel has {labels} labels for {values} values")]
    LengthMismatch { values: usize, labels: usize },
    #[error("outcome {outcome} occurs {count} times; at least {required} needed")]
    TooShort {
        outcome: usize,
        count: usize,
        required: usize,
    },
    #[error("rule `{rule}` needs a side channel but the sequence has none")]
    MissingSideChannel { rule: String },
    #[error("invalid rule `{rule}`: {reason}")]
    InvalidRule { rule: String, reason: &'static str },
    #[error("significance level {0} outside (0, 1)")]
    InvalidAlpha(f64),
    #[error("empty sequence")]
    Empty,
    #[error(transparent)]
    Epr(#[from] EprError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
}

/// What the side-channel labels of a sequence record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideChannelKind {
    /// Index of the preparation procedure used for each element.
    PreparationSetting,
    /// Outcome of a partner particle measured in coincidence.
    PartnerOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideChannel {
    pub kind: SideChannelKind,
    pub labels: Vec<usize>,
}

/// Outcome indices in the order observed, with optional per-element labels.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OutcomeSequence {
    values: Vec<usize>,
    side_channel: Option<SideChannel>,
}

impl OutcomeSequence {
    pub fn new(values: Vec<usize>) -> Self {
        Self {
            values,
            side_channel: None,
        }
    }

    pub fn with_side_channel(
        values: Vec<usize>,
        labels: Vec<usize>,
        kind: SideChannelKind,
    ) -> Result<Self, CollectiveError> {
        if labels.len() != values.len() {
            return Err(CollectiveError::LengthMismatch {
                values: values.len(),
                labels: labels.len(),
            });
        }
        Ok(Self {
            values,
            side_channel: Some(SideChannel { kind, labels }),
        })
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn side_channel(&self) -> Option<&SideChannel> {
        self.side_channel.as_ref()
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.side_channel.as_ref().map(|s| s.labels.as_slice())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Occurrence counts of outcomes `0..=max`.
    pub fn counts(&self) -> Vec<usize> {
        let k = self.values.iter().max().map_or(0, |m| m + 1);
        let mut counts = alloc::vec![0; k];
        for &v in &self.values {
            counts[v] += 1;
        }
        counts
    }

    /// Relative frequency of `outcome`; zero for an empty sequence.
    pub fn frequency(&self, outcome: usize) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().filter(|&&v| v == outcome).count() as f64 / self.values.len() as f64
    }
}

/// Everything a selection rule may look at when deciding on position
/// `position`.
#[derive(Debug, Clone, Copy)]
pub struct PriorView<'a> {
    pub position: usize,
    /// `values[0..position]`.
    pub prior_values: &'a [usize],
    /// `labels[0..position]`, when the sequence has a side channel.
    pub prior_labels: Option<&'a [usize]>,
    /// `labels[position]`, when the sequence has a side channel.
    pub label: Option<usize>,
}

type Predicate = dyn Fn(&PriorView<'_>) -> bool + Send + Sync;

/// A named outcome-blind predicate.
#[derive(Clone)]
pub struct CustomRule {
    name: String,
    predicate: Arc<Predicate>,
}

impl CustomRule {
    pub fn new(name: impl Into<String>, predicate: impl Fn(&PriorView<'_>) -> bool + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            predicate: Arc::new(predicate),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomRule").field("name", &self.name).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum HistoryRule {
    PreviousValueIs(usize),
    /// The last `pattern.len()` values equal `pattern`, oldest first.
    PreviousValuesAre(Vec<usize>),
    Custom(CustomRule),
}

#[derive(Debug, Clone)]
pub enum LabelRule {
    Is(usize),
    In(Vec<usize>),
    Custom(CustomRule),
}

#[derive(Debug, Clone)]
pub enum SelectionRule {
    /// Positions `offset, offset + step, offset + 2·step, …`.
    Arithmetic { step: usize, offset: usize },
    History(HistoryRule),
    SideChannel(LabelRule),
}

impl SelectionRule {
    pub fn every(step: usize, offset: usize) -> Self {
        Self::Arithmetic { step, offset }
    }

    pub fn previous_value_is(v: usize) -> Self {
        Self::History(HistoryRule::PreviousValueIs(v))
    }

    pub fn label_is(label: usize) -> Self {
        Self::SideChannel(LabelRule::Is(label))
    }

    pub fn needs_side_channel(&self) -> bool {
        matches!(self, Self::SideChannel(_))
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Arithmetic { step, offset } => alloc::format!("every {step} from {offset}"),
            Self::History(HistoryRule::PreviousValueIs(v)) => alloc::format!("previous value = {v}"),
            Self::History(HistoryRule::PreviousValuesAre(p)) => alloc::format!("previous values = {p:?}"),
            Self::History(HistoryRule::Custom(c)) => alloc::format!("history: {}", c.name),
            Self::SideChannel(LabelRule::Is(l)) => alloc::format!("label = {l}"),
            Self::SideChannel(LabelRule::In(ls)) => alloc::format!("label in {ls:?}"),
            Self::SideChannel(LabelRule::Custom(c)) => alloc::format!("label: {}", c.name),
        }
    }

    pub fn decide(&self, view: &PriorView<'_>) -> bool {
        match self {
            Self::Arithmetic { step, offset } => {
                *step > 0 && view.position >= *offset && (view.position - offset).is_multiple_of(*step)
            }
            Self::History(HistoryRule::PreviousValueIs(v)) => view.prior_values.last() == Some(v),
            Self::History(HistoryRule::PreviousValuesAre(p)) => {
                !p.is_empty() && view.prior_values.ends_with(p)
            }
            Self::History(HistoryRule::Custom(c)) => (c.predicate)(view),
            Self::SideChannel(LabelRule::Is(l)) => view.label == Some(*l),
            Self::SideChannel(LabelRule::In(ls)) => view.label.is_some_and(|l| ls.contains(&l)),
            Self::SideChannel(LabelRule::Custom(c)) => view.label.is_some() && (c.predicate)(view),
        }
    }

    fn validate(&self) -> Result<(), CollectiveError> {
        let invalid = |reason| CollectiveError::InvalidRule {
            rule: self.describe(),
            reason,
        };
        match self {
            Self::Arithmetic { step: 0, .. } => Err(invalid("step must be positive")),
            Self::History(HistoryRule::PreviousValuesAre(p)) if p.is_empty() => Err(invalid("empty pattern")),
            _ => Ok(()),
        }
    }
}

/// Selected positions, in order.
pub fn selected_positions(seq: &OutcomeSequence, rule: &SelectionRule) -> Vec<usize> {
    let labels = seq.labels();
    (0..seq.len())
        .filter(|&n| {
            let view = PriorView {
                position: n,
                prior_values: &seq.values[..n],
                prior_labels: labels.map(|l| &l[..n]),
                label: labels.map(|l| l[n]),
            };
            rule.decide(&view)
        })
        .collect()
}

/// The subsequence picked by `rule`, side channel carried along.
pub fn select(seq: &OutcomeSequence, rule: &SelectionRule) -> OutcomeSequence {
    let positions = selected_positions(seq, rule);
    OutcomeSequence {
        values: positions.iter().map(|&i| seq.values[i]).collect(),
        side_channel: seq.side_channel.as_ref().map(|s| SideChannel {
            kind: s.kind,
            labels: positions.iter().map(|&i| s.labels[i]).collect(),
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleVerdict {
    Homogeneous,
    Inhomogeneous,
    /// Partner-outcome selection that is empirically equivalent to selecting
    /// on the value itself; excluded from the verdict.
    Degenerate,
    /// The subsequence or its complement is empty.
    Untestable,
}

impl RuleVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Homogeneous => "homogeneous",
            Self::Inhomogeneous => "inhomogeneous",
            Self::Degenerate => "degenerate",
            Self::Untestable => "untestable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeStat {
    pub outcome: usize,
    pub freq_full: f64,
    pub freq_sub: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleReport {
    pub rule: String,
    pub selected: usize,
    pub verdict: RuleVerdict,
    pub outcomes: Vec<OutcomeStat>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneityReport {
    pub alpha: f64,
    /// Number of comparisons in the Bonferroni correction.
    pub comparisons: usize,
    /// Two-sided critical |z| after correction.
    pub critical_z: f64,
    pub rules: Vec<RuleReport>,
}

impl HomogeneityReport {
    pub fn inhomogeneous(&self) -> bool {
        self.rules.iter().any(|r| r.verdict == RuleVerdict::Inhomogeneous)
    }
}

fn pearson(xs: &[usize], ys: &[usize]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return None;
    }
    let mx = xs.iter().map(|&x| x as f64).sum::<f64>() / n;
    let my = ys.iter().map(|&y| y as f64).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x as f64 - mx, y as f64 - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

fn two_proportion_z(hits_sub: usize, n_sub: usize, hits_rest: usize, n_rest: usize, pooled: f64) -> f64 {
    let diff = hits_sub as f64 / n_sub as f64 - hits_rest as f64 / n_rest as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / n_sub as f64 + 1.0 / n_rest as f64)).sqrt();
    if se == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    } else {
        diff / se
    }
}

/// Tests every rule's subsequence against its complement.
///
/// With two outcomes the per-outcome statistics are negatives of each other,
/// so each rule contributes one comparison to the correction; with `K > 2`
/// outcomes it contributes `K`.
pub fn homogeneity_test(
    seq: &OutcomeSequence,
    rules: &[SelectionRule],
    alpha: f64,
) -> Result<HomogeneityReport, CollectiveError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CollectiveError::InvalidAlpha(alpha));
    }
    if seq.is_empty() {
        return Err(CollectiveError::Empty);
    }
    let counts = seq.counts();
    let present: Vec<usize> = (0..counts.len()).filter(|&k| counts[k] > 0).collect();
    for &k in &present {
        if counts[k] < MIN_OUTCOME_COUNT {
            return Err(CollectiveError::TooShort {
                outcome: k,
                count: counts[k],
                required: MIN_OUTCOME_COUNT,
            });
        }
    }
    for rule in rules {
        rule.validate()?;
        if rule.needs_side_channel() && seq.side_channel.is_none() {
            return Err(CollectiveError::MissingSideChannel { rule: rule.describe() });
        }
    }

    let degenerate_partner = seq.side_channel.as_ref().is_some_and(|s| {
        s.kind == SideChannelKind::PartnerOutcome
            && pearson(&seq.values, &s.labels).is_some_and(|r| r.abs() > DEGENERACY_CORRELATION)
    });

    let n = seq.len();
    let mut reports = Vec::with_capacity(rules.len());
    for rule in rules {
        let positions = selected_positions(seq, rule);
        let n_sub = positions.len();
        let n_rest = n - n_sub;
        let mut sub_counts = alloc::vec![0usize; counts.len()];
        for &i in &positions {
            sub_counts[seq.values[i]] += 1;
        }
        let outcomes = present
            .iter()
            .map(|&k| {
                let freq_full = counts[k] as f64 / n as f64;
                let freq_sub = if n_sub == 0 {
                    f64::NAN
                } else {
                    sub_counts[k] as f64 / n_sub as f64
                };
                let z = if n_sub == 0 || n_rest == 0 {
                    f64::NAN
                } else {
                    two_proportion_z(sub_counts[k], n_sub, counts[k] - sub_counts[k], n_rest, freq_full)
                };
                OutcomeStat {
                    outcome: k,
                    freq_full,
                    freq_sub,
                    z,
                }
            })
            .collect();
        let verdict = if n_sub == 0 || n_rest == 0 {
            RuleVerdict::Untestable
        } else if rule.needs_side_channel() && degenerate_partner {
            RuleVerdict::Degenerate
        } else {
            RuleVerdict::Homogeneous
        };
        reports.push(RuleReport {
            rule: rule.describe(),
            selected: n_sub,
            verdict,
            outcomes,
        });
    }

    let per_rule = if present.len() == 2 { 1 } else { present.len().max(1) };
    let tested = reports.iter().filter(|r| r.verdict == RuleVerdict::Homogeneous).count();
    let comparisons = (tested * per_rule).max(1);
    let critical_z = normal_quantile(1.0 - alpha / (2.0 * comparisons as f64));
    for r in &mut reports {
        if r.verdict == RuleVerdict::Homogeneous && r.outcomes.iter().any(|o| o.z.abs() > critical_z) {
            r.verdict = RuleVerdict::Inhomogeneous;
        }
    }
    Ok(HomogeneityReport {
        alpha,
        comparisons,
        critical_z,
        rules: reports,
    })
}

/// Coincidence measurements of `pvm1 ⊗ pvm2` on `n` copies of `state`.
/// Each returned sequence carries the other's outcomes as a partner-outcome
/// side channel.
pub fn generate_epr_sequences(
    state: &StateVector,
    pvm1: &DiscretePVM,
    pvm2: &DiscretePVM,
    n: u64,
    seed: u64,
) -> Result<(OutcomeSequence, OutcomeSequence), CollectiveError> {
    generate_epr_sequences_with(&Sequential, state, pvm1, pvm2, n, seed)
}

pub fn generate_epr_sequences_with<E: ChunkExecutor>(
    exec: &E,
    state: &StateVector,
    pvm1: &DiscretePVM,
    pvm2: &DiscretePVM,
    n: u64,
    seed: u64,
) -> Result<(OutcomeSequence, OutcomeSequence), CollectiveError> {
    let grid = joint_probability_parts(state, pvm1, pvm2)?;
    let cols = grid.cols();
    let flat: Vec<f64> = grid.probabilities.iter().flatten().copied().collect();
    let plan = MonteCarloPlan::new(n, seed);
    let chunks = exec.map_chunks(plan.chunk_count(), |c| {
        let mut rng = plan.chunk_rng("collectives/epr", c);
        (0..plan.chunk_len(c))
            .map(|_| draw_index(&mut rng, &flat))
            .collect::<Vec<_>>()
    });
    let (first, second): (Vec<usize>, Vec<usize>) =
        chunks.into_iter().flatten().map(|k| (k / cols, k % cols)).unzip();
    Ok((
        OutcomeSequence::with_side_channel(first.clone(), second.clone(), SideChannelKind::PartnerOutcome)?,
        OutcomeSequence::with_side_channel(second, first, SideChannelKind::PartnerOutcome)?,
    ))
}

/// Proper mixture: each element is prepared in `preparations[j].1` with
/// probability proportional to `preparations[j].0` and measured with `povm`;
/// the side channel records `j`.
pub fn generate_proper_mixture(
    preparations: &[(f64, DensityOperator)],
    povm: &DiscretePOVM,
    n: u64,
    seed: u64,
) -> Result<OutcomeSequence, CollectiveError> {
    generate_proper_mixture_with(&Sequential, preparations, povm, n, seed)
}

pub fn generate_proper_mixture_with<E: ChunkExecutor>(
    exec: &E,
    preparations: &[(f64, DensityOperator)],
    povm: &DiscretePOVM,
    n: u64,
    seed: u64,
) -> Result<OutcomeSequence, CollectiveError> {
    if preparations.is_empty() {
        return Err(CollectiveError::Empty);
    }
    let weights: Vec<f64> = preparations.iter().map(|(w, _)| w.max(0.0)).collect();
    let outcome_probs = preparations
        .iter()
        .map(|(_, rho)| probabilities(rho, povm))
        .collect::<Result<Vec<_>, _>>()?;
    let plan = MonteCarloPlan::new(n, seed);
    let chunks = exec.map_chunks(plan.chunk_count(), |c| {
        let mut rng = plan.chunk_rng("collectives/proper-mixture", c);
        (0..plan.chunk_len(c))
            .map(|_| {
                let j = draw_index(&mut rng, &weights);
                (draw_index(&mut rng, &outcome_probs[j]), j)
            })
            .collect::<Vec<_>>()
    });
    let (values, labels) = chunks.into_iter().flatten().unzip();
    OutcomeSequence::with_side_channel(values, labels, SideChannelKind::PreparationSetting)
}

/// I.i.d. draws from `probabilities`, no side channel.
pub fn generate_iid(probabilities: &[f64], n: u64, seed: u64) -> OutcomeSequence {
    let plan = MonteCarloPlan::new(n, seed);
    let values = Sequential
        .map_chunks(plan.chunk_count(), |c| {
            let mut rng = plan.chunk_rng("collectives/iid", c);
            (0..plan.chunk_len(c))
                .map(|_| draw_index(&mut rng, probabilities))
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();
    OutcomeSequence::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::density_from_pure;
    use core::f64::consts::PI;

    #[test]
    fn side_channel_length_is_checked() {
        assert!(matches!(
            OutcomeSequence::with_side_channel(alloc::vec![0, 1], alloc::vec![0], SideChannelKind::PartnerOutcome),
            Err(CollectiveError::LengthMismatch { values: 2, labels: 1 })
        ));
    }

    #[test]
    fn arithmetic_selection_halves() {
        let seq = OutcomeSequence::new((0..11).map(|i| i % 3).collect());
        let sub = select(&seq, &SelectionRule::every(2, 0));
        assert_eq!(sub.values(), [0, 2, 1, 0, 2, 1]);
        assert_eq!(select(&seq, &SelectionRule::every(2, 1)).len(), 5);
    }

    #[test]
    fn label_selection_picks_subensemble() {
        let seq = OutcomeSequence::with_side_channel(
            alloc::vec![0, 1, 0, 0, 1],
            alloc::vec![1, 0, 1, 1, 0],
            SideChannelKind::PreparationSetting,
        )
        .unwrap();
        let sub = select(&seq, &SelectionRule::label_is(1));
        assert_eq!(sub.values(), [0, 0, 0]);
        assert_eq!(sub.labels().unwrap(), [1, 1, 1]);
    }

    #[test]
    fn history_selection_uses_prior_values() {
        let seq = OutcomeSequence::new(alloc::vec![0, 1, 0, 0, 1, 1]);
        let sub = select(&seq, &SelectionRule::previous_value_is(0));
        assert_eq!(selected_positions(&seq, &SelectionRule::previous_value_is(0)), [1, 3, 4]);
        assert_eq!(sub.values(), [1, 0, 1]);
        let pattern = SelectionRule::History(HistoryRule::PreviousValuesAre(alloc::vec![0, 0]));
        assert_eq!(selected_positions(&seq, &pattern), [4]);
    }

    #[test]
    fn custom_rules_see_only_the_past() {
        let rule = SelectionRule::History(HistoryRule::Custom(CustomRule::new("checks view", |v| {
            assert_eq!(v.prior_values.len(), v.position);
            assert_eq!(v.prior_labels.map(<[usize]>::len), Some(v.position));
            true
        })));
        let seq = OutcomeSequence::with_side_channel(
            alloc::vec![1, 0, 1],
            alloc::vec![2, 2, 3],
            SideChannelKind::PartnerOutcome,
        )
        .unwrap();
        assert_eq!(select(&seq, &rule).len(), 3);
    }

    #[test]
    fn constant_sequence_is_homogeneous() {
        let seq = OutcomeSequence::new(alloc::vec![1; 200]);
        let rules = [SelectionRule::every(2, 0), SelectionRule::previous_value_is(1)];
        let report = homogeneity_test(&seq, &rules, 0.01).unwrap();
        assert!(!report.inhomogeneous());
        assert_eq!(report.rules[0].verdict, RuleVerdict::Homogeneous);
        assert_eq!(report.rules[0].outcomes[0].z, 0.0);
        // Every position after the first is selected; the complement is {0}.
        assert_eq!(report.rules[1].selected, 199);
    }

    #[test]
    fn short_sequences_are_rejected() {
        let mut values = alloc::vec![0; 100];
        values.extend([1; 10]);
        assert!(matches!(
            homogeneity_test(&OutcomeSequence::new(values), &[SelectionRule::every(2, 0)], 0.01),
            Err(CollectiveError::TooShort { outcome: 1, count: 10, .. })
        ));
    }

    #[test]
    fn label_rule_needs_side_channel() {
        let seq = OutcomeSequence::new(alloc::vec![0; 50]);
        assert!(matches!(
            homogeneity_test(&seq, &[SelectionRule::label_is(0)], 0.01),
            Err(CollectiveError::MissingSideChannel { .. })
        ));
        assert!(matches!(
            homogeneity_test(&seq, &[SelectionRule::every(0, 0)], 0.01),
            Err(CollectiveError::InvalidRule { .. })
        ));
    }

    #[test]
    fn proper_mixture_is_inhomogeneous_under_label_rule() {
        let preps = [
            (0.5, density_from_pure(&StateVector::basis(2, 0))),
            (0.5, density_from_pure(&StateVector::basis(2, 1))),
        ];
        let seq = generate_proper_mixture(&preps, &DiscretePVM::computational(2).to_povm(), 2000, 7).unwrap();
        let report = homogeneity_test(&seq, &[SelectionRule::label_is(0), SelectionRule::every(2, 0)], 0.01).unwrap();
        assert_eq!(report.rules[0].verdict, RuleVerdict::Inhomogeneous);
        assert_eq!(report.rules[0].outcomes[0].freq_sub, 1.0);
    }

    #[test]
    fn improper_mixture_with_non_schmidt_partner_is_inhomogeneous() {
        // Particle 2 in σz, particle 1 at angle π/3: p(+|+) = ¼, p(+|−) = ¾.
        let (first, second) = generate_epr_sequences(
            &StateVector::singlet(),
            &DiscretePVM::spin_angle(PI / 3.0),
            &DiscretePVM::computational(2),
            20_000,
            3,
        )
        .unwrap();
        let up = select(&second, &SelectionRule::label_is(0));
        assert!((up.frequency(0) - 0.25).abs() < 0.02);
        let down = select(&second, &SelectionRule::label_is(1));
        assert!((down.frequency(0) - 0.75).abs() < 0.02);
        let report = homogeneity_test(&second, &[SelectionRule::label_is(0)], 0.01).unwrap();
        assert_eq!(report.rules[0].verdict, RuleVerdict::Inhomogeneous);
        assert_eq!(first.len(), 20_000);
    }

    #[test]
    fn selecting_on_anticorrelated_partner_is_degenerate() {
        let z = DiscretePVM::computational(2);
        let (first, second) = generate_epr_sequences(&StateVector::singlet(), &z, &z, 1000, 11).unwrap();
        assert!(first.values().iter().zip(second.values()).all(|(a, b)| a != b));
        let report = homogeneity_test(&second, &[SelectionRule::label_is(0)], 0.01).unwrap();
        assert_eq!(report.rules[0].verdict, RuleVerdict::Degenerate);
        assert!(!report.inhomogeneous());
    }

    #[test]
    fn generation_is_reproducible() {
        let x = DiscretePVM::spin([1.0, 0.0, 0.0]);
        let z = DiscretePVM::computational(2);
        let a = generate_epr_sequences(&StateVector::singlet(), &x, &z, 500, 5).unwrap();
        let b = generate_epr_sequences(&StateVector::singlet(), &x, &z, 500, 5).unwrap();
        assert_eq!(a, b);
        let c = generate_epr_sequences(&StateVector::singlet(), &x, &z, 500, 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn iid_frequencies() {
        let seq = generate_iid(&[0.3, 0.7], 100_000, 1);
        let sigma = (0.3f64 * 0.7 / 100_000.0).sqrt();
        assert!((seq.frequency(0) - 0.3).abs() < 4.0 * sigma);
    }
}
