//! Hidden-variable models, CHSH correlations and the joint-distribution
//! oracle.
//!
//! Two model families are distinguished by what the outcome probabilities
//! are conditioned on:
//!
//! * [`HVModel`]: a single hidden state `λ` with a context-independent
//!   density. Correlations for all four setting pairs are estimated from the
//!   same `λ` draws, so the per-sample product of the four responses is a
//!   quadrivariate distribution with the four grids as marginals and the CHSH
//!   bound `|S| ≤ 2` follows.
//! * [`TrajectoryModel`]: every measurement context `(first, second)` has its
//!   own sampler. Nothing ties the contexts together and no quadrivariate
//!   distribution is assembled.
//!
//! Monte Carlo estimates average the response probabilities of each sample
//! instead of drawing outcomes from them, and carry standard errors from the
//! per-sample variance. Settings are labelled `A1`, `B1` on the first wing and
//! `A2`, `B2` on the second; dichotomic outcome index 0 stands for `+1`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use thiserror::Error;

use crate::epr::{joint_probability_parts, EprError};
use crate::montecarlo::{ChunkExecutor, MonteCarloPlan, Sequential};
use crate::observables::{draw_index, DiscretePVM};
use crate::random::{unit_vector3, QRng};
use crate::states::StateVector;
use crate::stats::Moments;

/// Tolerance of the joint-distribution decision and of table validation.
pub const LP_TOLERANCE: f64 = 1e-9;
/// Largest CHSH value attainable by a quadrivariate distribution.
pub const LOCAL_BOUND: f64 = 2.0;

const RESPONSE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SubquantumError {
    #[error("unknown observable `{0}`")]
    UnknownObservable(String),
    #[error("observable `{0}` is not dichotomic")]
    NotDichotomic(String),
    #[error("response of `{observable}` is not a probability distribution")]
    InvalidResponse { observable: String },
    #[error("no sampler for context ({first}, {second})")]
    MissingContext { first: String, second: String },
    #[error("invalid correlation table: {0}")]
    InvalidTable(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("sample count must be positive")]
    NoSamples,
    #[error(transparent)]
    Epr(#[from] EprError),
}

/// Unit vector `(sin θ, 0, cos θ)`.
pub fn spin_direction(theta: f64) -> [f64; 3] {
    [theta.sin(), 0.0, theta.cos()]
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// One setting per observable slot of a CHSH experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshSettings<T> {
    pub a1: T,
    pub b1: T,
    pub a2: T,
    pub b2: T,
}

impl<T> ChshSettings<T> {
    pub const PAIR_NAMES: [(&'static str, &'static str); 4] = [("A1", "A2"), ("A1", "B2"), ("B1", "A2"), ("B1", "B2")];

    /// `(A1,A2), (A1,B2), (B1,A2), (B1,B2)`.
    pub fn pairs(&self) -> [(&T, &T); 4] {
        [
            (&self.a1, &self.a2),
            (&self.a1, &self.b2),
            (&self.b1, &self.a2),
            (&self.b1, &self.b2),
        ]
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> ChshSettings<U> {
        ChshSettings {
            a1: f(&self.a1),
            b1: f(&self.b1),
            a2: f(&self.a2),
            b2: f(&self.b2),
        }
    }
}

impl ChshSettings<f64> {
    /// `(0, π/2; π/4, 3π/4)`, where the singlet reaches `2√2`.
    pub fn optimal_angles() -> Self {
        use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        Self {
            a1: 0.0,
            b1: FRAC_PI_2,
            a2: FRAC_PI_4,
            b2: 3.0 * FRAC_PI_4,
        }
    }
}

impl ChshSettings<&'static str> {
    pub fn default_labels() -> Self {
        Self {
            a1: "A1",
            b1: "B1",
            a2: "A2",
            b2: "B2",
        }
    }
}

/// Instantaneous hidden-variable model: `p_A(aᵢ) = ∫ dλ ρ(λ) p_A(aᵢ|λ)`.
pub trait HVModel: Sync {
    type Lambda;

    fn observable_labels(&self) -> &[String];
    fn outcome_count(&self, observable: usize) -> usize;
    fn sample_lambda(&self, rng: &mut QRng) -> Self::Lambda;
    /// Writes `p(aᵢ|λ)` for every outcome into `out`.
    fn response(&self, observable: usize, lambda: &Self::Lambda, out: &mut [f64]);
}

/// Model whose hidden state is drawn per measurement context.
pub trait TrajectoryModel: Sync {
    type Trajectory;

    fn observable_labels(&self) -> &[String];
    fn outcome_count(&self, observable: usize) -> usize;
    /// Identifies the sampler of context `(first, second)`; `None` when the
    /// model has no sampler for it. Contexts with equal keys are fed the same
    /// random stream.
    fn sampler_key(&self, context: (usize, usize)) -> Option<u64>;
    fn sample_trajectory(&self, context: (usize, usize), rng: &mut QRng) -> Self::Trajectory;
    fn response(&self, observable: usize, trajectory: &Self::Trajectory, out: &mut [f64]);
}

/// An [`HVModel`] seen as a trajectory model with one shared sampler for
/// every context.
#[derive(Debug, Clone)]
pub struct Instantaneous<M>(pub M);

impl<M: HVModel> TrajectoryModel for Instantaneous<M> {
    type Trajectory = M::Lambda;

    fn observable_labels(&self) -> &[String] {
        self.0.observable_labels()
    }

    fn outcome_count(&self, observable: usize) -> usize {
        self.0.outcome_count(observable)
    }

    fn sampler_key(&self, _context: (usize, usize)) -> Option<u64> {
        Some(0)
    }

    fn sample_trajectory(&self, _context: (usize, usize), rng: &mut QRng) -> M::Lambda {
        self.0.sample_lambda(rng)
    }

    fn response(&self, observable: usize, trajectory: &M::Lambda, out: &mut [f64]) {
        self.0.response(observable, trajectory, out)
    }
}

fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn dichotomic(out: &mut [f64], value: f64) {
    out[0] = if value > 0.0 { 1.0 } else { 0.0 };
    out[1] = 1.0 - out[0];
}

/// Observable of a [`SphereModel`]: outcome `+1` with probability
/// `(1 + sharpness · wing_sign · sign(n·λ)) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereObservable {
    pub label: String,
    pub direction: [f64; 3],
    pub wing_sign: f64,
    pub sharpness: f64,
}

/// `λ` uniform on the unit sphere, spin-like sign responses.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereModel {
    labels: Vec<String>,
    observables: Vec<SphereObservable>,
}

impl SphereModel {
    pub fn new(observables: Vec<SphereObservable>) -> Result<Self, SubquantumError> {
        for o in &observables {
            let len = dot3(&o.direction, &o.direction).sqrt();
            if !((len - 1.0).abs() < 1e-9) || !(0.0..=1.0).contains(&o.sharpness) || o.wing_sign.abs() != 1.0 {
                return Err(SubquantumError::InvalidModel(format!("observable `{}`", o.label)));
            }
        }
        Ok(Self {
            labels: observables.iter().map(|o| o.label.clone()).collect(),
            observables,
        })
    }

    /// Wing 1 answers `sign(a·λ)`, wing 2 answers `−sign(b·λ)`.
    pub fn local_singlet(directions: &ChshSettings<[f64; 3]>) -> Self {
        let obs = |label: &str, direction: [f64; 3], wing_sign: f64| SphereObservable {
            label: label.into(),
            direction,
            wing_sign,
            sharpness: 1.0,
        };
        Self::new(alloc::vec![
            obs("A1", directions.a1, 1.0),
            obs("B1", directions.b1, 1.0),
            obs("A2", directions.a2, -1.0),
            obs("B2", directions.b2, -1.0),
        ])
        .expect("unit directions")
    }
}

impl HVModel for SphereModel {
    type Lambda = [f64; 3];

    fn observable_labels(&self) -> &[String] {
        &self.labels
    }

    fn outcome_count(&self, _observable: usize) -> usize {
        2
    }

    fn sample_lambda(&self, rng: &mut QRng) -> [f64; 3] {
        unit_vector3(rng)
    }

    fn response(&self, observable: usize, lambda: &[f64; 3], out: &mut [f64]) {
        let o = &self.observables[observable];
        let s = o.wing_sign * sign(dot3(&o.direction, lambda));
        out[0] = 0.5 * (1.0 + o.sharpness * s);
        out[1] = 1.0 - out[0];
    }
}

/// Finitely many hidden states with explicit weights and response tables;
/// expectations can be integrated exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteHVModel {
    labels: Vec<String>,
    weights: Vec<f64>,
    /// `responses[observable][λ][outcome]`.
    responses: Vec<Vec<Vec<f64>>>,
}

impl DiscreteHVModel {
    pub fn new(labels: Vec<String>, weights: Vec<f64>, responses: Vec<Vec<Vec<f64>>>) -> Result<Self, SubquantumError> {
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || weights.iter().any(|w| !(*w >= 0.0)) || !(total > 0.0) {
            return Err(SubquantumError::InvalidModel("weights must be nonnegative with positive sum".into()));
        }
        if labels.len() != responses.len() {
            return Err(SubquantumError::InvalidModel("one response table per label".into()));
        }
        for (label, table) in labels.iter().zip(&responses) {
            let k = table.first().map_or(0, Vec::len);
            let bad = table.len() != weights.len()
                || k == 0
                || table.iter().any(|r| {
                    r.len() != k || r.iter().any(|p| !(*p >= 0.0)) || (r.iter().sum::<f64>() - 1.0).abs() > RESPONSE_TOLERANCE
                });
            if bad {
                return Err(SubquantumError::InvalidResponse {
                    observable: label.clone(),
                });
            }
        }
        let weights = weights.iter().map(|w| w / total).collect();
        Ok(Self {
            labels,
            weights,
            responses,
        })
    }

    /// Random weights over `hidden_states` states and random dichotomic
    /// responses for the four CHSH slots. About half the responses are
    /// deterministic.
    pub fn random_chsh<R: Rng + ?Sized>(rng: &mut R, hidden_states: usize) -> Self {
        let weights: Vec<f64> = (0..hidden_states).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let responses = (0..4)
            .map(|_| {
                (0..hidden_states)
                    .map(|_| {
                        let p: f64 = if rng.gen_bool(0.5) {
                            if rng.gen_bool(0.5) {
                                1.0
                            } else {
                                0.0
                            }
                        } else {
                            rng.gen()
                        };
                        alloc::vec![p, 1.0 - p]
                    })
                    .collect()
            })
            .collect();
        let labels = ["A1", "B1", "A2", "B2"].iter().map(|s| String::from(*s)).collect();
        Self::new(labels, weights, responses).expect("valid by construction")
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ_λ ρ(λ) p_A(·|λ)`.
    pub fn exact_single_probability(&self, observable: &str) -> Result<Vec<f64>, SubquantumError> {
        let i = index_of(self, observable)?;
        let k = self.outcome_count(i);
        let mut p = alloc::vec![0.0; k];
        for (w, r) in self.weights.iter().zip(&self.responses[i]) {
            for (acc, x) in p.iter_mut().zip(r) {
                *acc += w * x;
            }
        }
        Ok(p)
    }

    /// Exact table with its quadrivariate distribution.
    pub fn exact_correlation_table(&self, settings: &ChshSettings<&str>) -> Result<CorrelationTable, SubquantumError> {
        let idx = resolve_dichotomic(self, settings)?;
        let slots = [idx.a1, idx.b1, idx.a2, idx.b2];
        let mut quad = [0.0; 16];
        for (l, w) in self.weights.iter().enumerate() {
            let r: [&[f64]; 4] = core::array::from_fn(|s| self.responses[slots[s]][l].as_slice());
            accumulate_quad(&mut quad, &r, *w);
        }
        let mut table = CorrelationTable::from_quadrivariate(pair_labels(settings), &quad)?;
        table.quadrivariate = Some(quad);
        Ok(table)
    }
}

impl HVModel for DiscreteHVModel {
    type Lambda = usize;

    fn observable_labels(&self) -> &[String] {
        &self.labels
    }

    fn outcome_count(&self, observable: usize) -> usize {
        self.responses[observable][0].len()
    }

    fn sample_lambda(&self, rng: &mut QRng) -> usize {
        draw_index(rng, &self.weights)
    }

    fn response(&self, observable: usize, lambda: &usize, out: &mut [f64]) {
        out.copy_from_slice(&self.responses[observable][*lambda]);
    }
}

/// Model assembled from closures.
pub struct FnModel<S, R> {
    labels: Vec<String>,
    outcomes: Vec<usize>,
    sampler: S,
    response: R,
}

impl<L, S, R> FnModel<S, R>
where
    S: Fn(&mut QRng) -> L + Sync,
    R: Fn(usize, &L, &mut [f64]) + Sync,
{
    /// `observables` pairs each label with its outcome count.
    pub fn new(observables: Vec<(String, usize)>, sampler: S, response: R) -> Self {
        let (labels, outcomes) = observables.into_iter().unzip();
        Self {
            labels,
            outcomes,
            sampler,
            response,
        }
    }
}

impl<L, S, R> HVModel for FnModel<S, R>
where
    S: Fn(&mut QRng) -> L + Sync,
    R: Fn(usize, &L, &mut [f64]) + Sync,
{
    type Lambda = L;

    fn observable_labels(&self) -> &[String] {
        &self.labels
    }

    fn outcome_count(&self, observable: usize) -> usize {
        self.outcomes[observable]
    }

    fn sample_lambda(&self, rng: &mut QRng) -> L {
        (self.sampler)(rng)
    }

    fn response(&self, observable: usize, lambda: &L, out: &mut [f64]) {
        (self.response)(observable, lambda, out)
    }
}

/// Reference contextual model. In context `(a, b)` the hidden unit vector is
/// drawn with density proportional to `|a·λ|`; wing 1 answers `sign(a·λ)` and
/// wing 2 answers `−sign(b·λ)`, giving `E(a, b) = −a·b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextualSphereModel {
    labels: Vec<String>,
    directions: [[f64; 3]; 4],
}

impl ContextualSphereModel {
    pub fn new(directions: &ChshSettings<[f64; 3]>) -> Self {
        Self {
            labels: ["A1", "B1", "A2", "B2"].iter().map(|s| String::from(*s)).collect(),
            directions: [directions.a1, directions.b1, directions.a2, directions.b2],
        }
    }
}

/// Two unit vectors completing `a` to an orthonormal frame.
fn orthonormal_frame(a: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let seed = if a[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = dot3(&seed, a);
    let mut e1 = [seed[0] - d * a[0], seed[1] - d * a[1], seed[2] - d * a[2]];
    let n = dot3(&e1, &e1).sqrt();
    e1.iter_mut().for_each(|x| *x /= n);
    let e2 = [
        a[1] * e1[2] - a[2] * e1[1],
        a[2] * e1[0] - a[0] * e1[2],
        a[0] * e1[1] - a[1] * e1[0],
    ];
    (e1, e2)
}

impl TrajectoryModel for ContextualSphereModel {
    type Trajectory = [f64; 3];

    fn observable_labels(&self) -> &[String] {
        &self.labels
    }

    fn outcome_count(&self, _observable: usize) -> usize {
        2
    }

    fn sampler_key(&self, context: (usize, usize)) -> Option<u64> {
        let (first, second) = context;
        (first < 2 && (2..4).contains(&second)).then_some((first * 4 + second) as u64)
    }

    fn sample_trajectory(&self, context: (usize, usize), rng: &mut QRng) -> [f64; 3] {
        let a = &self.directions[context.0];
        // |u| = √U has density 2|u| on [0, 1].
        let magnitude = rng.gen::<f64>().sqrt();
        let u = if rng.gen_bool(0.5) { magnitude } else { -magnitude };
        let phi = core::f64::consts::TAU * rng.gen::<f64>();
        let (e1, e2) = orthonormal_frame(a);
        let r = (1.0 - u * u).max(0.0).sqrt();
        let (s, c) = phi.sin_cos();
        core::array::from_fn(|k| u * a[k] + r * (c * e1[k] + s * e2[k]))
    }

    fn response(&self, observable: usize, trajectory: &[f64; 3], out: &mut [f64]) {
        let v = dot3(&self.directions[observable], trajectory);
        if observable < 2 {
            dichotomic(out, sign(v));
        } else {
            dichotomic(out, -sign(v));
        }
    }
}

/// Monte Carlo estimate of one outcome distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityEstimate {
    pub probabilities: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub samples: u64,
}

/// Four dichotomic outcome grids, one per setting pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    /// Observable labels of each pair, in [`ChshSettings::pairs`] order.
    pub pairs: [(String, String); 4],
    /// `grids[pair][i][j]`, index 0 for `+1`.
    pub grids: [[[f64; 2]; 2]; 4],
    /// Standard error of each correlation, for Monte Carlo tables.
    pub std_errors: Option<[f64; 4]>,
    /// Joint distribution of `(A1, B1, A2, B2)` at index `8a + 4b + 2c + d`,
    /// when one was assembled.
    pub quadrivariate: Option<[f64; 16]>,
    pub samples: Option<u64>,
}

impl CorrelationTable {
    pub fn new(pairs: [(String, String); 4], grids: [[[f64; 2]; 2]; 4]) -> Result<Self, SubquantumError> {
        for (p, g) in grids.iter().enumerate() {
            let sum: f64 = g.iter().flatten().sum();
            if g.iter().flatten().any(|x| !(*x >= -LP_TOLERANCE)) || (sum - 1.0).abs() > LP_TOLERANCE {
                return Err(SubquantumError::InvalidTable(format!(
                    "grid {p} is not a distribution (sum {sum})"
                )));
            }
        }
        Ok(Self {
            pairs,
            grids,
            std_errors: None,
            quadrivariate: None,
            samples: None,
        })
    }

    /// Tables with settings `A1, B1, A2, B2` built from correlations alone,
    /// with uniform marginals.
    pub fn from_correlations(e: [f64; 4]) -> Result<Self, SubquantumError> {
        let grids = e.map(|e| {
            let same = (1.0 + e) / 4.0;
            let diff = (1.0 - e) / 4.0;
            [[same, diff], [diff, same]]
        });
        Self::new(pair_labels(&ChshSettings::default_labels()), grids)
    }

    fn from_quadrivariate(pairs: [(String, String); 4], q: &[f64; 16]) -> Result<Self, SubquantumError> {
        Self::new(pairs, quad_marginals(q))
    }

    /// `E = Σᵢⱼ ij pᵢⱼ` with outcomes `±1`.
    pub fn correlation(&self, pair: usize) -> f64 {
        let g = &self.grids[pair];
        g[0][0] + g[1][1] - g[0][1] - g[1][0]
    }

    pub fn correlations(&self) -> [f64; 4] {
        core::array::from_fn(|p| self.correlation(p))
    }

    /// `Sₖ = Σₚ Eₚ − 2Eₖ`: the sum with the minus sign on pair `k`. Index 3
    /// is the textbook `E(A1,A2) + E(A1,B2) + E(B1,A2) − E(B1,B2)`.
    pub fn chsh_variants(&self) -> [f64; 4] {
        let e = self.correlations();
        let total: f64 = e.iter().sum();
        core::array::from_fn(|k| total - 2.0 * e[k])
    }

    /// Upper bound on the standard error of every CHSH variant.
    pub fn chsh_std_error(&self) -> f64 {
        self.std_errors.map_or(0.0, |s| s.iter().sum())
    }

    /// Marginal of slot `A1`, `B1`, `A2`, `B2` (index 0–3) as read from each
    /// of the two pairs containing it.
    fn slot_marginals(&self, slot: usize) -> ([f64; 2], [f64; 2]) {
        let row = |p: usize| [self.grids[p][0][0] + self.grids[p][0][1], self.grids[p][1][0] + self.grids[p][1][1]];
        let col = |p: usize| [self.grids[p][0][0] + self.grids[p][1][0], self.grids[p][0][1] + self.grids[p][1][1]];
        match slot {
            0 => (row(0), row(1)),
            1 => (row(2), row(3)),
            2 => (col(0), col(2)),
            _ => (col(1), col(3)),
        }
    }
}

/// `max |Sₖ|` over the sign placements.
pub fn chsh_value(table: &CorrelationTable) -> f64 {
    table.chsh_variants().iter().fold(0.0, |m, s| m.max(s.abs()))
}

fn pair_labels<T: AsRef<str>>(settings: &ChshSettings<T>) -> [(String, String); 4] {
    settings
        .pairs()
        .map(|(a, b)| (String::from(a.as_ref()), String::from(b.as_ref())))
}

fn quad_marginals(q: &[f64; 16]) -> [[[f64; 2]; 2]; 4] {
    let mut grids = [[[0.0; 2]; 2]; 4];
    for (k, &x) in q.iter().enumerate() {
        let (a, b, c, d) = (k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1);
        grids[0][a][c] += x;
        grids[1][a][d] += x;
        grids[2][b][c] += x;
        grids[3][b][d] += x;
    }
    grids
}

/// Adds `w · r_A1[a] r_B1[b] r_A2[c] r_B2[d]` to every cell.
fn accumulate_quad(quad: &mut [f64; 16], r: &[&[f64]; 4], w: f64) {
    for (k, cell) in quad.iter_mut().enumerate() {
        *cell += w * r[0][k >> 3 & 1] * r[1][k >> 2 & 1] * r[2][k >> 1 & 1] * r[3][k & 1];
    }
}

trait Labelled {
    fn labels(&self) -> &[String];
    fn outcomes(&self, i: usize) -> usize;
}

impl<M: HVModel> Labelled for M {
    fn labels(&self) -> &[String] {
        self.observable_labels()
    }

    fn outcomes(&self, i: usize) -> usize {
        self.outcome_count(i)
    }
}

struct TrajectoryLabels<'a, M>(&'a M);

impl<M: TrajectoryModel> Labelled for TrajectoryLabels<'_, M> {
    fn labels(&self) -> &[String] {
        self.0.observable_labels()
    }

    fn outcomes(&self, i: usize) -> usize {
        self.0.outcome_count(i)
    }
}

fn index_of<M: Labelled + ?Sized>(model: &M, label: &str) -> Result<usize, SubquantumError> {
    model
        .labels()
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| SubquantumError::UnknownObservable(label.into()))
}

fn resolve_dichotomic<M: Labelled + ?Sized>(
    model: &M,
    settings: &ChshSettings<&str>,
) -> Result<ChshSettings<usize>, SubquantumError> {
    let mut err = None;
    let idx = settings.map(|l| match index_of(model, l) {
        Ok(i) if model.outcomes(i) == 2 => i,
        Ok(_) => {
            err.get_or_insert(SubquantumError::NotDichotomic(String::from(*l)));
            0
        }
        Err(e) => {
            err.get_or_insert(e);
            0
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(idx),
    }
}

fn check_response(out: &[f64]) -> bool {
    out.iter().all(|p| *p >= -RESPONSE_TOLERANCE) && (out.iter().sum::<f64>() - 1.0).abs() <= RESPONSE_TOLERANCE
}

/// Monte Carlo estimate of `p_A(aᵢ) = ∫ dλ ρ(λ) p_A(aᵢ|λ)`.
pub fn hv_single_probability<M: HVModel>(
    model: &M,
    observable: &str,
    n_samples: u64,
    seed: u64,
) -> Result<ProbabilityEstimate, SubquantumError> {
    hv_single_probability_with(&Sequential, model, observable, n_samples, seed)
}

pub fn hv_single_probability_with<E: ChunkExecutor, M: HVModel>(
    exec: &E,
    model: &M,
    observable: &str,
    n_samples: u64,
    seed: u64,
) -> Result<ProbabilityEstimate, SubquantumError> {
    if n_samples == 0 {
        return Err(SubquantumError::NoSamples);
    }
    let i = index_of(model, observable)?;
    let k = model.outcome_count(i);
    let plan = MonteCarloPlan::new(n_samples, seed);
    let chunks = exec.map_chunks(plan.chunk_count(), |c| {
        let mut rng = plan.chunk_rng("subquantum/single", c);
        let mut moments = alloc::vec![Moments::default(); k];
        let mut out = alloc::vec![0.0; k];
        for _ in 0..plan.chunk_len(c) {
            let lambda = model.sample_lambda(&mut rng);
            model.response(i, &lambda, &mut out);
            if !check_response(&out) {
                return None;
            }
            let total: f64 = out.iter().sum();
            for (m, p) in moments.iter_mut().zip(&out) {
                m.push(p / total);
            }
        }
        Some(moments)
    });
    let mut moments = alloc::vec![Moments::default(); k];
    for chunk in chunks {
        let chunk = chunk.ok_or_else(|| SubquantumError::InvalidResponse {
            observable: observable.into(),
        })?;
        moments.iter_mut().zip(&chunk).for_each(|(a, b)| a.merge(b));
    }
    Ok(ProbabilityEstimate {
        probabilities: moments.iter().map(Moments::mean).collect(),
        std_errors: moments.iter().map(Moments::std_error).collect(),
        samples: n_samples,
    })
}

struct HvChunk {
    quad: [f64; 16],
    e: [Moments; 4],
}

/// Correlation table of an instantaneous model. Every sample draws one `λ`
/// and evaluates all four observables on it; the table carries the
/// resulting quadrivariate distribution.
pub fn hv_correlation_table<M: HVModel>(
    model: &M,
    settings: &ChshSettings<&str>,
    n_samples: u64,
    seed: u64,
) -> Result<CorrelationTable, SubquantumError> {
    hv_correlation_table_with(&Sequential, model, settings, n_samples, seed)
}

pub fn hv_correlation_table_with<E: ChunkExecutor, M: HVModel>(
    exec: &E,
    model: &M,
    settings: &ChshSettings<&str>,
    n_samples: u64,
    seed: u64,
) -> Result<CorrelationTable, SubquantumError> {
    if n_samples == 0 {
        return Err(SubquantumError::NoSamples);
    }
    let idx = resolve_dichotomic(model, settings)?;
    let slots = [idx.a1, idx.b1, idx.a2, idx.b2];
    let plan = MonteCarloPlan::new(n_samples, seed);
    let chunks = exec.map_chunks(plan.chunk_count(), |c| {
        let mut rng = plan.chunk_rng("subquantum/hv", c);
        let mut acc = HvChunk {
            quad: [0.0; 16],
            e: [Moments::default(); 4],
        };
        let mut r = [[0.0; 2]; 4];
        for _ in 0..plan.chunk_len(c) {
            let lambda = model.sample_lambda(&mut rng);
            for (s, &o) in slots.iter().enumerate() {
                model.response(o, &lambda, &mut r[s]);
                if !check_response(&r[s]) {
                    return Err(o);
                }
            }
            accumulate_quad(&mut acc.quad, &[&r[0], &r[1], &r[2], &r[3]], 1.0);
            let d: [f64; 4] = core::array::from_fn(|s| r[s][0] - r[s][1]);
            acc.e[0].push(d[0] * d[2]);
            acc.e[1].push(d[0] * d[3]);
            acc.e[2].push(d[1] * d[2]);
            acc.e[3].push(d[1] * d[3]);
        }
        Ok(acc)
    });
    let mut quad = [0.0; 16];
    let mut e = [Moments::default(); 4];
    for chunk in chunks {
        let chunk = chunk.map_err(|o| SubquantumError::InvalidResponse {
            observable: model.observable_labels()[o].clone(),
        })?;
        quad.iter_mut().zip(&chunk.quad).for_each(|(a, b)| *a += b);
        e.iter_mut().zip(&chunk.e).for_each(|(a, b)| a.merge(b));
    }
    let n = n_samples as f64;
    quad.iter_mut().for_each(|x| *x /= n);
    let mut table = CorrelationTable::from_quadrivariate(pair_labels(settings), &quad)?;
    table.quadrivariate = Some(quad);
    table.std_errors = Some(e.map(|m| m.std_error()));
    table.samples = Some(n_samples);
    Ok(table)
}

/// Correlation table of a trajectory model: `n_samples` draws per setting
/// pair from that pair's own sampler.
pub fn trajectory_correlation<M: TrajectoryModel>(
    model: &M,
    settings: &ChshSettings<&str>,
    n_samples: u64,
    seed: u64,
) -> Result<CorrelationTable, SubquantumError> {
    trajectory_correlation_with(&Sequential, model, settings, n_samples, seed)
}

pub fn trajectory_correlation_with<E: ChunkExecutor, M: TrajectoryModel>(
    exec: &E,
    model: &M,
    settings: &ChshSettings<&str>,
    n_samples: u64,
    seed: u64,
) -> Result<CorrelationTable, SubquantumError> {
    if n_samples == 0 {
        return Err(SubquantumError::NoSamples);
    }
    let idx = resolve_dichotomic(&TrajectoryLabels(model), settings)?;
    let plan = MonteCarloPlan::new(n_samples, seed);
    let mut grids = [[[0.0; 2]; 2]; 4];
    let mut std_errors = [0.0; 4];
    for (p, (&first, &second)) in idx.pairs().into_iter().enumerate() {
        let context = (first, second);
        let key = model.sampler_key(context).ok_or_else(|| SubquantumError::MissingContext {
            first: model.observable_labels()[first].clone(),
            second: model.observable_labels()[second].clone(),
        })?;
        let domain = format!("subquantum/trajectory/{key}");
        let chunks = exec.map_chunks(plan.chunk_count(), |c| {
            let mut rng = plan.chunk_rng(&domain, c);
            let mut grid = [[0.0; 2]; 2];
            let mut e = Moments::default();
            let (mut r1, mut r2) = ([0.0; 2], [0.0; 2]);
            for _ in 0..plan.chunk_len(c) {
                let t = model.sample_trajectory(context, &mut rng);
                model.response(first, &t, &mut r1);
                model.response(second, &t, &mut r2);
                if !check_response(&r1) {
                    return Err(first);
                }
                if !check_response(&r2) {
                    return Err(second);
                }
                for i in 0..2 {
                    for j in 0..2 {
                        grid[i][j] += r1[i] * r2[j];
                    }
                }
                e.push((r1[0] - r1[1]) * (r2[0] - r2[1]));
            }
            Ok((grid, e))
        });
        let mut e = Moments::default();
        for chunk in chunks {
            let (g, m) = chunk.map_err(|o| SubquantumError::InvalidResponse {
                observable: model.observable_labels()[o].clone(),
            })?;
            for i in 0..2 {
                for j in 0..2 {
                    grids[p][i][j] += g[i][j];
                }
            }
            e.merge(&m);
        }
        grids[p].iter_mut().flatten().for_each(|x| *x /= n_samples as f64);
        std_errors[p] = e.std_error();
    }
    let mut table = CorrelationTable::new(pair_labels(settings), grids)?;
    table.std_errors = Some(std_errors);
    table.samples = Some(n_samples);
    Ok(table)
}

/// Exact table `p(aᵢ, bⱼ) = ⟨ψ|Pᵢ ⊗ Qⱼ|ψ⟩` for each setting pair.
pub fn quantum_correlation_table(
    state: &StateVector,
    settings: &ChshSettings<DiscretePVM>,
) -> Result<CorrelationTable, SubquantumError> {
    let labels = ChshSettings::default_labels();
    for (pvm, label) in [
        (&settings.a1, labels.a1),
        (&settings.b1, labels.b1),
        (&settings.a2, labels.a2),
        (&settings.b2, labels.b2),
    ] {
        if pvm.len() != 2 {
            return Err(SubquantumError::NotDichotomic(label.into()));
        }
    }
    let mut grids = [[[0.0; 2]; 2]; 4];
    for (p, (first, second)) in settings.pairs().into_iter().enumerate() {
        let g = joint_probability_parts(state, first, second)?;
        for i in 0..2 {
            for j in 0..2 {
                grids[p][i][j] = g.get(i, j);
            }
        }
    }
    CorrelationTable::new(pair_labels(&labels), grids)
}

/// Spin observables along `spin_direction(θ)` for each slot.
pub fn spin_settings(angles: &ChshSettings<f64>) -> ChshSettings<DiscretePVM> {
    angles.map(|&t| DiscretePVM::spin_angle(t))
}

/// Why no quadrivariate distribution reproduces a table.
#[derive(Debug, Clone, PartialEq)]
pub enum InfeasibilityCertificate {
    /// CHSH variant `k` (see [`CorrelationTable::chsh_variants`]) with
    /// `|Sₖ| = value > 2`.
    Chsh { variant: usize, value: f64 },
    /// The two pairs containing `observable` disagree on its marginal.
    InconsistentMarginals { observable: String, discrepancy: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum JointDistribution {
    /// A distribution over `(A1, B1, A2, B2)`, indexed as in
    /// [`CorrelationTable::quadrivariate`], whose pair marginals match the
    /// table within [`LP_TOLERANCE`].
    Feasible { witness: [f64; 16] },
    Infeasible { certificate: InfeasibilityCertificate },
}

impl JointDistribution {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }
}

const RANK: usize = 9;

/// Decides whether four dichotomic grids are the pair marginals of one
/// distribution over `(A1, B1, A2, B2)`.
///
/// The marginal constraints `Aq = b, q ≥ 0` have rank 9 in 16 unknowns. If
/// the polytope is nonempty it has a vertex, and every vertex is a basic
/// solution over 9 columns, so trying all nonsingular 9-column bases decides
/// feasibility. The bases and their inverses are computed once.
#[derive(Debug, Clone)]
pub struct JointDistributionOracle {
    constraints: [[f64; 16]; 16],
    rows: [usize; RANK],
    bases: Vec<([usize; RANK], [[f64; RANK]; RANK])>,
}

impl Default for JointDistributionOracle {
    fn default() -> Self {
        Self::new()
    }
}

fn invert(mut a: [[f64; RANK]; RANK]) -> Option<[[f64; RANK]; RANK]> {
    let mut inv = [[0.0; RANK]; RANK];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..RANK {
        let pivot = (col..RANK).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for k in 0..RANK {
            a[col][k] /= p;
            inv[col][k] /= p;
        }
        for r in 0..RANK {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                for k in 0..RANK {
                    a[r][k] -= f * a[col][k];
                    inv[r][k] -= f * inv[col][k];
                }
            }
        }
    }
    Some(inv)
}

impl JointDistributionOracle {
    pub fn new() -> Self {
        let mut constraints = [[0.0; 16]; 16];
        for k in 0..16 {
            let (a, b, c, d) = (k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1);
            constraints[a * 2 + c][k] = 1.0;
            constraints[4 + a * 2 + d][k] = 1.0;
            constraints[8 + b * 2 + c][k] = 1.0;
            constraints[12 + b * 2 + d][k] = 1.0;
        }

        // Greedy choice of independent rows by Gram-Schmidt.
        let mut basis: Vec<[f64; 16]> = Vec::new();
        let mut rows = [0; RANK];
        for (r, row) in constraints.iter().enumerate() {
            let mut v = *row;
            for b in &basis {
                let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-9 {
                v.iter_mut().for_each(|x| *x /= n);
                rows[basis.len()] = r;
                basis.push(v);
                if basis.len() == RANK {
                    break;
                }
            }
        }
        debug_assert_eq!(basis.len(), RANK);

        let mut bases = Vec::new();
        let mut cols: [usize; RANK] = core::array::from_fn(|i| i);
        loop {
            let sub: [[f64; RANK]; RANK] = core::array::from_fn(|i| core::array::from_fn(|j| constraints[rows[i]][cols[j]]));
            if let Some(inv) = invert(sub) {
                bases.push((cols, inv));
            }
            // Next combination in lexicographic order.
            let mut i = RANK;
            loop {
                if i == 0 {
                    return Self {
                        constraints,
                        rows,
                        bases,
                    };
                }
                i -= 1;
                if cols[i] < 16 - RANK + i {
                    break;
                }
            }
            cols[i] += 1;
            for j in i + 1..RANK {
                cols[j] = cols[j - 1] + 1;
            }
        }
    }

    pub fn basis_count(&self) -> usize {
        self.bases.len()
    }

    pub fn decide(&self, table: &CorrelationTable) -> JointDistribution {
        let mut b = [0.0; 16];
        for (p, g) in table.grids.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    b[p * 4 + i * 2 + j] = g[i][j];
                }
            }
        }
        let rhs: [f64; RANK] = core::array::from_fn(|i| b[self.rows[i]]);
        for (cols, inv) in &self.bases {
            let xb: [f64; RANK] = core::array::from_fn(|i| (0..RANK).map(|j| inv[i][j] * rhs[j]).sum());
            if xb.iter().any(|&x| x < -LP_TOLERANCE) {
                continue;
            }
            let mut q = [0.0; 16];
            for (&c, &x) in cols.iter().zip(&xb) {
                q[c] = x.max(0.0);
            }
            let residual = self
                .constraints
                .iter()
                .zip(&b)
                .map(|(row, bi)| (row.iter().zip(&q).map(|(a, x)| a * x).sum::<f64>() - bi).abs())
                .fold(0.0, f64::max);
            if residual <= LP_TOLERANCE {
                return JointDistribution::Feasible { witness: q };
            }
        }
        JointDistribution::Infeasible {
            certificate: certificate(table),
        }
    }
}

fn certificate(table: &CorrelationTable) -> InfeasibilityCertificate {
    let names = ["A1", "B1", "A2", "B2"];
    let mut worst = (0, 0.0);
    for slot in 0..4 {
        let (x, y) = table.slot_marginals(slot);
        let d = (x[0] - y[0]).abs().max((x[1] - y[1]).abs());
        if d > worst.1 {
            worst = (slot, d);
        }
    }
    if worst.1 > LP_TOLERANCE {
        return InfeasibilityCertificate::InconsistentMarginals {
            observable: names[worst.0].into(),
            discrepancy: worst.1,
        };
    }
    let variants = table.chsh_variants();
    let (variant, value) = variants
        .iter()
        .enumerate()
        .map(|(k, s)| (k, s.abs()))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    InfeasibilityCertificate::Chsh { variant, value }
}

/// One-shot form of [`JointDistributionOracle::decide`].
pub fn joint_distribution_exists(table: &CorrelationTable) -> JointDistribution {
    JointDistributionOracle::new().decide(table)
}
