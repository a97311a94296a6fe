//! Joint nonideal measurements of incompatible observables.
//!
//! A bivariate POVM `{R_mn}` measures targets `{P_m'}` and `{Q_n'}` jointly
//! but nonideally when its marginals are stochastic smearings of them:
//!
//! ```text
//! Σₙ R_mn = Σ_m' λ_mm' P_m'      Σₘ R_mn = Σ_n' μ_nn' Q_n'
//! ```
//!
//! with `λ`, `μ` nonnegative and column-stochastic. [`solve_nonideality`]
//! recovers such a matrix by constrained least squares, and
//! [`entropy_nonideality`] measures how far it is from a permutation-like
//! ideal. For PVM targets the pair obeys
//! `J_λ + J_μ ≥ −ln max Tr(PₘQₙ)`, which [`verify_martens`] checks.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::linalg::{eig_hermitian, ComplexMatrix, LinalgError};
use crate::observables::{default_labels, DiscretePOVM, DiscretePVM, ObservableError};

/// A decomposition with residual Frobenius norm below this is exact.
pub const FEASIBILITY_THRESHOLD: f64 = 1e-8;
/// Tolerance on column sums of a nonideality matrix.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-9;
/// Slack allowed when checking `J_λ + J_μ` against the bound.
pub const MARTENS_SLACK: f64 = 1e-9;

const MAX_ITERATIONS: usize = 100_000;
const GRADIENT_TOLERANCE: f64 = 1e-12;
/// Relative eigenvalue cutoff below which the target effects are treated as
/// linearly dependent.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JointError {
    #[error("bivariate grid is empty or ragged")]
    RaggedGrid,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("entry ({row}, {col}) = {value:e} is negative")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("column {col} sums to {sum}")]
    NotStochastic { col: usize, sum: f64 },
    #[error("no exact nonideality decomposition: residual {residual:e}")]
    Infeasible { residual: f64, best: NonidealityMatrix },
    #[error(transparent)]
    Observable(#[from] ObservableError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Grid of effects `R_mn` forming a POVM over outcome pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePOVM {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    effects: Vec<Vec<ComplexMatrix>>,
}

impl BivariatePOVM {
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        effects: Vec<Vec<ComplexMatrix>>,
    ) -> Result<Self, JointError> {
        let cols = effects.first().map_or(0, Vec::len);
        if cols == 0 || effects.iter().any(|r| r.len() != cols) {
            return Err(JointError::RaggedGrid);
        }
        if row_labels.len() != effects.len() || col_labels.len() != cols {
            return Err(ObservableError::LabelCount {
                labels: row_labels.len() * col_labels.len(),
                effects: effects.len() * cols,
            }
            .into());
        }
        let flat: Vec<ComplexMatrix> = effects.iter().flatten().cloned().collect();
        let checked = DiscretePOVM::new(default_labels(flat.len()), flat)?;
        let effects = checked.effects().chunks(cols).map(<[ComplexMatrix]>::to_vec).collect();
        Ok(Self {
            row_labels,
            col_labels,
            effects,
        })
    }

    /// Labels `0, 1, …` on both axes.
    pub fn from_effects(effects: Vec<Vec<ComplexMatrix>>) -> Result<Self, JointError> {
        let rows = effects.len();
        let cols = effects.first().map_or(0, Vec::len);
        Self::new(default_labels(rows), default_labels(cols), effects)
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn effects(&self) -> &[Vec<ComplexMatrix>] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0][0].rows()
    }

    /// `({Σₙ R_mn}, {Σₘ R_mn})`.
    pub fn marginals(&self) -> (DiscretePOVM, DiscretePOVM) {
        let d = self.dim();
        let rows = self
            .effects
            .iter()
            .map(|row| row.iter().fold(ComplexMatrix::zeros(d, d), |acc, e| &acc + e))
            .collect();
        let cols = (0..self.col_labels.len())
            .map(|n| {
                self.effects
                    .iter()
                    .fold(ComplexMatrix::zeros(d, d), |acc, row| &acc + &row[n])
            })
            .collect();
        (
            DiscretePOVM::new(self.row_labels.clone(), rows).expect("marginal of a valid grid"),
            DiscretePOVM::new(self.col_labels.clone(), cols).expect("marginal of a valid grid"),
        )
    }
}

/// Nonnegative matrix `λ_mm'` whose columns sum to one; rows index observed
/// outcomes, columns index target outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct NonidealityMatrix {
    entries: Vec<Vec<f64>>,
}

impl NonidealityMatrix {
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self, JointError> {
        let cols = entries.first().map_or(0, Vec::len);
        if cols == 0 || entries.iter().any(|r| r.len() != cols) {
            return Err(JointError::RaggedGrid);
        }
        for (row, r) in entries.iter().enumerate() {
            for (col, &value) in r.iter().enumerate() {
                if !(value >= 0.0) {
                    return Err(JointError::NegativeEntry { row, col, value });
                }
            }
        }
        for col in 0..cols {
            let sum: f64 = entries.iter().map(|r| r[col]).sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
                return Err(JointError::NotStochastic { col, sum });
            }
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        }
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn get(&self, m: usize, m_prime: usize) -> f64 {
        self.entries[m][m_prime]
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries[0].len()
    }

    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

/// Result of [`solve_nonideality`].
#[derive(Debug, Clone, PartialEq)]
pub struct NonidealityFit {
    pub matrix: NonidealityMatrix,
    /// `(Σₘ ‖observedₘ − Σ_m' λ_mm' idealₘ'‖²_F)^½`.
    pub residual: f64,
    /// False when the target effects are linearly dependent; `matrix` is then
    /// the minimum-Frobenius-norm solution.
    pub unique: bool,
    pub iterations: usize,
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumulative += ui;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Projects every column of the row-major `m × n` matrix onto the simplex.
fn project_columns(x: &mut [f64], m: usize, n: usize) {
    let mut col = alloc::vec![0.0; m];
    for j in 0..n {
        for i in 0..m {
            col[i] = x[i * n + j];
        }
        project_simplex(&mut col);
        for i in 0..m {
            x[i * n + j] = col[i];
        }
    }
}

fn real_trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.trace_product(b).re
}

struct Problem {
    m: usize,
    n: usize,
    /// `G_ij = Re Tr(Iᵢ Iⱼ)`, `n × n`.
    gram: Vec<f64>,
    /// `B_ij = Re Tr(Oᵢ Iⱼ)`, `m × n`.
    cross: Vec<f64>,
}

impl Problem {
    /// `∇f = 2(λG − B)`.
    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let (m, n) = (self.m, self.n);
        for i in 0..m {
            for j in 0..n {
                let mut acc = -self.cross[i * n + j];
                for k in 0..n {
                    acc += x[i * n + k] * self.gram[k * n + j];
                }
                out[i * n + j] = 2.0 * acc;
            }
        }
    }

    fn objective(&self, x: &[f64]) -> f64 {
        let (m, n) = (self.m, self.n);
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..n {
                let mut g = 0.0;
                for k in 0..n {
                    g += x[i * n + k] * self.gram[k * n + j];
                }
                acc += x[i * n + j] * (g - 2.0 * self.cross[i * n + j]);
            }
        }
        acc
    }
}

/// FISTA with adaptive restart over the product of column simplices, started
/// at the uniform matrix. Returns the iterate and the iteration count.
fn projected_gradient(problem: &Problem, step: f64) -> (Vec<f64>, usize) {
    let (m, n) = (problem.m, problem.n);
    let len = m * n;
    let mut x = alloc::vec![1.0 / m as f64; len];
    let mut y = x.clone();
    let mut t = 1.0;
    let mut grad = alloc::vec![0.0; len];
    let mut next = alloc::vec![0.0; len];
    let mut f_prev = problem.objective(&x);
    for iter in 0..MAX_ITERATIONS {
        problem.gradient(&y, &mut grad);
        for k in 0..len {
            next[k] = y[k] - step * grad[k];
        }
        project_columns(&mut next, m, n);

        // Gradient mapping at x: (x − P(x − s∇f(x))) / s.
        problem.gradient(&next, &mut grad);
        let mut mapped = next.clone();
        for k in 0..len {
            mapped[k] -= step * grad[k];
        }
        project_columns(&mut mapped, m, n);
        let gmap = next
            .iter()
            .zip(&mapped)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            / step;
        if gmap < GRADIENT_TOLERANCE {
            return (next, iter + 1);
        }

        let f_next = problem.objective(&next);
        if f_next > f_prev {
            // Restart momentum.
            t = 1.0;
            y.copy_from_slice(&x);
            continue;
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let beta = (t - 1.0) / t_next;
        for k in 0..len {
            y[k] = next[k] + beta * (next[k] - x[k]);
        }
        x.copy_from_slice(&next);
        t = t_next;
        f_prev = f_next;
    }
    (x, MAX_ITERATIONS)
}

/// Dykstra's alternating projections from the origin onto the intersection of
/// the column-simplex product and `{λ : λG = λ*G}`, giving the minimizer of
/// smallest Frobenius norm.
fn minimum_norm_solution(x_star: &[f64], range_projector: &[f64], m: usize, n: usize) -> Vec<f64> {
    let len = m * n;
    let affine = |v: &mut [f64]| {
        // v ← v − (v − x*) R, with R projecting rows onto range(G).
        for i in 0..m {
            let diff: Vec<f64> = (0..n).map(|j| v[i * n + j] - x_star[i * n + j]).collect();
            for j in 0..n {
                let correction: f64 = (0..n).map(|k| diff[k] * range_projector[k * n + j]).sum();
                v[i * n + j] -= correction;
            }
        }
    };
    let mut x = alloc::vec![0.0; len];
    let mut p = alloc::vec![0.0; len];
    let mut q = alloc::vec![0.0; len];
    let mut y = alloc::vec![0.0; len];
    for _ in 0..MAX_ITERATIONS {
        for k in 0..len {
            y[k] = x[k] + p[k];
        }
        project_columns(&mut y, m, n);
        for k in 0..len {
            p[k] = x[k] + p[k] - y[k];
        }
        let mut x_next: Vec<f64> = (0..len).map(|k| y[k] + q[k]).collect();
        affine(&mut x_next);
        for k in 0..len {
            q[k] = y[k] + q[k] - x_next[k];
        }
        let change = x_next.iter().zip(&x).fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
        x = x_next;
        if change < GRADIENT_TOLERANCE {
            break;
        }
    }
    // The limit lies in both sets; finish on the simplex side.
    project_columns(&mut x, m, n);
    x
}

/// Least-squares nonideality matrix `λ` with
/// `observedₘ ≈ Σ_m' λ_mm' idealₘ'`, `λ ≥ 0`, columns summing to one.
///
/// Returns [`JointError::Infeasible`] carrying the best fit when the residual
/// is not below [`FEASIBILITY_THRESHOLD`].
pub fn solve_nonideality(observed: &DiscretePOVM, ideal: &DiscretePOVM) -> Result<NonidealityFit, JointError> {
    if observed.dim() != ideal.dim() {
        return Err(JointError::DimensionMismatch(observed.dim(), ideal.dim()));
    }
    let (m, n) = (observed.len(), ideal.len());
    let ie = ideal.effects();
    let oe = observed.effects();
    let gram: Vec<f64> = (0..n * n).map(|k| real_trace_product(&ie[k / n], &ie[k % n])).collect();
    let cross: Vec<f64> = (0..m * n).map(|k| real_trace_product(&oe[k / n], &ie[k % n])).collect();

    let gram_matrix = ComplexMatrix::from_fn(n, n, |i, j| gram[i * n + j].into());
    let spectrum = eig_hermitian(&gram_matrix)?;
    let top = spectrum.max_eigenvalue().max(f64::MIN_POSITIVE);
    let cutoff = RANK_TOLERANCE * top;
    let unique = spectrum.min_eigenvalue() > cutoff;

    let problem = Problem { m, n, gram, cross };
    let step = 1.0 / (2.0 * top);
    let (mut x, iterations) = projected_gradient(&problem, step);
    if !unique {
        let mut range = alloc::vec![0.0; n * n];
        for (k, &ev) in spectrum.eigenvalues.iter().enumerate() {
            if ev > cutoff {
                let v = spectrum.eigenvector(k);
                for i in 0..n {
                    for j in 0..n {
                        range[i * n + j] += (v[i] * v[j].conj()).re;
                    }
                }
            }
        }
        x = minimum_norm_solution(&x, &range, m, n);
    }

    let residual = oe
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let fitted = (0..n).fold(ComplexMatrix::zeros(o.rows(), o.rows()), |acc, j| {
                &acc + &ie[j].scale_real(x[i * n + j])
            });
            let r = o.distance(&fitted);
            r * r
        })
        .sum::<f64>()
        .sqrt();

    let matrix = NonidealityMatrix {
        entries: x.chunks(n).map(<[f64]>::to_vec).collect(),
    };
    if residual >= FEASIBILITY_THRESHOLD {
        return Err(JointError::Infeasible { residual, best: matrix });
    }
    Ok(NonidealityFit {
        matrix,
        residual,
        unique,
        iterations,
    })
}

/// Average row entropy
/// `J = −(1/N) Σ_mm' λ_mm' ln(λ_mm' / Σ_m'' λ_mm'')` in nats, with `N` the
/// number of target outcomes and `0 ln 0 = 0`.
pub fn entropy_nonideality(lambda: &NonidealityMatrix) -> f64 {
    let n = lambda.cols() as f64;
    let mut total = 0.0;
    for row in &lambda.entries {
        let sum: f64 = row.iter().sum();
        if sum <= 0.0 {
            continue;
        }
        for &x in row {
            if x > 0.0 {
                total -= x * (x / sum).ln();
            }
        }
    }
    (total / n).max(0.0)
}

/// `−ln max_mn Tr(PₘQₙ)`.
pub fn martens_bound(p: &DiscretePVM, q: &DiscretePVM) -> Result<f64, JointError> {
    if p.dim() != q.dim() {
        return Err(JointError::DimensionMismatch(p.dim(), q.dim()));
    }
    let max = p
        .projectors()
        .iter()
        .flat_map(|a| q.projectors().iter().map(move |b| real_trace_product(a, b)))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(-max.ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MartensReport {
    pub lambda: NonidealityFit,
    pub mu: NonidealityFit,
    pub j_lambda: f64,
    pub j_mu: f64,
    /// Present only when both targets are PVMs.
    pub bound: Option<f64>,
}

impl MartensReport {
    pub fn j_sum(&self) -> f64 {
        self.j_lambda + self.j_mu
    }

    /// `J_λ + J_μ − bound`.
    pub fn margin(&self) -> Option<f64> {
        self.bound.map(|b| self.j_sum() - b)
    }

    /// `None` when no bound applies.
    pub fn satisfied(&self) -> Option<bool> {
        self.margin().map(|m| m >= -MARTENS_SLACK)
    }
}

/// Nonideality of `r`'s marginals relative to arbitrary POVM targets. The
/// entropic bound is attached only when both targets are projective.
pub fn nonideality_report(r: &BivariatePOVM, p: &DiscretePOVM, q: &DiscretePOVM) -> Result<MartensReport, JointError> {
    let (rows, cols) = r.marginals();
    let lambda = solve_nonideality(&rows, p)?;
    let mu = solve_nonideality(&cols, q)?;
    let bound = match (p.as_pvm(), q.as_pvm()) {
        (Some(pp), Some(qq)) => Some(martens_bound(&pp, &qq)?),
        _ => None,
    };
    Ok(MartensReport {
        j_lambda: entropy_nonideality(&lambda.matrix),
        j_mu: entropy_nonideality(&mu.matrix),
        lambda,
        mu,
        bound,
    })
}

/// Decomposes both marginals of `r` and checks `J_λ + J_μ ≥ bound − 10⁻⁹`.
pub fn verify_martens(r: &BivariatePOVM, p: &DiscretePVM, q: &DiscretePVM) -> Result<MartensReport, JointError> {
    nonideality_report(r, &p.to_povm(), &q.to_povm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use core::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn unsharp_grid(g1: f64, g2: f64) -> BivariatePOVM {
        let signs = [1.0, -1.0];
        let effects = signs
            .iter()
            .map(|&m| {
                signs
                    .iter()
                    .map(|&n| {
                        let v = [n * g2, 0.0, m * g1];
                        (&pauli::identity2() + &pauli::dot_sigma(v)).scale_real(0.25)
                    })
                    .collect()
            })
            .collect();
        BivariatePOVM::from_effects(effects).unwrap()
    }

    fn z() -> DiscretePVM {
        DiscretePVM::computational(2)
    }

    fn x() -> DiscretePVM {
        DiscretePVM::spin([1.0, 0.0, 0.0])
    }

    fn unsharp_z(g: f64) -> DiscretePOVM {
        let e = |s: f64| (&pauli::identity2() + &pauli::z().scale_real(s * g)).scale_real(0.5);
        DiscretePOVM::new(default_labels(2), alloc::vec![e(1.0), e(-1.0)]).unwrap()
    }

    /// `−Σ x ln x` over one row whose entries already sum to one.
    fn row_entropy(row: &[f64]) -> f64 {
        row.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
    }

    #[test]
    fn grid_validation() {
        let bad = alloc::vec![alloc::vec![pauli::identity2(), pauli::identity2()]];
        assert!(matches!(BivariatePOVM::from_effects(bad), Err(JointError::Observable(_))));
        assert!(matches!(
            BivariatePOVM::from_effects(alloc::vec![alloc::vec![pauli::identity2()], alloc::vec![]]),
            Err(JointError::RaggedGrid)
        ));
    }

    #[test]
    fn marginals_of_degenerate_grid() {
        let pz = z();
        let zero = ComplexMatrix::zeros(2, 2);
        let r = BivariatePOVM::from_effects(
            pz.projectors()
                .iter()
                .map(|p| alloc::vec![p.clone(), zero.clone()])
                .collect(),
        )
        .unwrap();
        let (rows, cols) = r.marginals();
        assert_eq!(rows.effects(), pz.projectors());
        assert!(cols.effects()[0].distance(&pauli::identity2()) < 1e-15);
        assert!(cols.effects()[1].max_abs() < 1e-15);
    }

    #[test]
    fn marginals_of_unsharp_grid() {
        let g = FRAC_1_SQRT_2;
        let (rows, cols) = unsharp_grid(g, g).marginals();
        assert!(rows.effects()[0].distance(unsharp_z(g).effects().first().unwrap()) < 1e-15);
        let expected = (&pauli::identity2() + &pauli::x().scale_real(-g)).scale_real(0.5);
        assert!(cols.effects()[1].distance(&expected) < 1e-15);
    }

    #[test]
    fn marginals_of_product_grid() {
        let a = unsharp_z(0.6);
        let b = unsharp_z(0.3);
        let effects = a
            .effects()
            .iter()
            .map(|ea| b.effects().iter().map(|eb| ea * eb).collect())
            .collect();
        let (rows, cols) = BivariatePOVM::from_effects(effects).unwrap().marginals();
        for k in 0..2 {
            assert!(rows.effects()[k].distance(&a.effects()[k]) < 1e-15);
            assert!(cols.effects()[k].distance(&b.effects()[k]) < 1e-15);
        }
    }

    #[test]
    fn ideal_observation_gives_identity() {
        let fit = solve_nonideality(&z().to_povm(), &z().to_povm()).unwrap();
        assert!(fit.unique);
        assert!(fit.matrix.max_abs_difference(&NonidealityMatrix::identity(2)) < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn unsharp_observation_gives_smearing() {
        let g = FRAC_1_SQRT_2;
        let (a, b) = ((1.0 + g) / 2.0, (1.0 - g) / 2.0);
        let fit = solve_nonideality(&unsharp_z(g), &z().to_povm()).unwrap();
        let expected = NonidealityMatrix::new(alloc::vec![alloc::vec![a, b], alloc::vec![b, a]]).unwrap();
        assert!(fit.matrix.max_abs_difference(&expected) < 1e-12);
        let j = entropy_nonideality(&fit.matrix);
        assert!((j - row_entropy(&[a, b])).abs() < 1e-12);
        assert!((j - 0.4165).abs() < 1e-4);
    }

    #[test]
    fn incompatible_projectors_are_infeasible() {
        match solve_nonideality(&x().to_povm(), &z().to_povm()) {
            Err(JointError::Infeasible { residual, .. }) => assert!(residual > 0.5),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn dependent_targets_give_minimum_norm_solution() {
        // Any column-stochastic λ with unit row sums fits; the smallest is ½ everywhere.
        let half = DiscretePOVM::trivial(2, &[0.5, 0.5]).unwrap();
        let fit = solve_nonideality(&half, &half).unwrap();
        assert!(!fit.unique);
        for row in fit.matrix.entries() {
            for &v in row {
                assert!((v - 0.5).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn nonideality_matrix_validation() {
        assert!(matches!(
            NonidealityMatrix::new(alloc::vec![alloc::vec![0.5, 1.0], alloc::vec![0.4, 0.0]]),
            Err(JointError::NotStochastic { col: 0, .. })
        ));
        assert!(matches!(
            NonidealityMatrix::new(alloc::vec![alloc::vec![1.1], alloc::vec![-0.1]]),
            Err(JointError::NegativeEntry { row: 1, col: 0, .. })
        ));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_nonideality(&NonidealityMatrix::identity(3)), 0.0);
        let half = NonidealityMatrix::new(alloc::vec![alloc::vec![0.5, 0.5], alloc::vec![0.5, 0.5]]).unwrap();
        assert!((entropy_nonideality(&half) - LN_2).abs() < 1e-15);
        let sharp_rows = NonidealityMatrix::new(alloc::vec![alloc::vec![1.0, 1.0], alloc::vec![0.0, 0.0]]).unwrap();
        assert!((entropy_nonideality(&sharp_rows) - LN_2).abs() < 1e-15);
    }

    #[test]
    fn bound_examples() {
        assert!(martens_bound(&z(), &z()).unwrap().abs() < 1e-15);
        assert!((martens_bound(&z(), &x()).unwrap() - LN_2).abs() < 1e-14);
        // Fourier basis in d = 3 is unbiased with respect to the standard one.
        let w = core::f64::consts::TAU / 3.0;
        let fourier: Vec<Vec<num_complex::Complex64>> = (0..3)
            .map(|k| {
                (0..3)
                    .map(|j| num_complex::Complex64::from_polar(1.0 / 3f64.sqrt(), w * (j * k) as f64))
                    .collect()
            })
            .collect();
        let f = DiscretePVM::from_basis(&fourier).unwrap();
        let bound = martens_bound(&DiscretePVM::computational(3), &f).unwrap();
        assert!((bound - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn martens_on_reference_grids() {
        let g = FRAC_1_SQRT_2;
        let report = verify_martens(&unsharp_grid(g, g), &z(), &x()).unwrap();
        let oracle = 2.0 * row_entropy(&[(1.0 + g) / 2.0, (1.0 - g) / 2.0]);
        assert!((report.j_sum() - oracle).abs() < 1e-9);
        assert!((report.j_sum() - 0.833).abs() < 1e-3);
        assert_eq!(report.satisfied(), Some(true));
        assert!((report.margin().unwrap() - 0.140).abs() < 1e-3);

        let i = pauli::identity2();
        let zero = ComplexMatrix::zeros(2, 2);
        let trivial = BivariatePOVM::from_effects(alloc::vec![
            alloc::vec![i, zero.clone()],
            alloc::vec![zero.clone(), zero.clone()],
        ])
        .unwrap();
        let report = verify_martens(&trivial, &z(), &x()).unwrap();
        assert!((report.j_sum() - 2.0 * LN_2).abs() < 1e-9);
        assert_eq!(report.satisfied(), Some(true));

        let pz = z();
        let ideal = BivariatePOVM::from_effects(alloc::vec![
            alloc::vec![pz.projectors()[0].clone(), zero.clone()],
            alloc::vec![zero, pz.projectors()[1].clone()],
        ])
        .unwrap();
        let report = verify_martens(&ideal, &pz, &pz).unwrap();
        assert!(report.j_sum().abs() < 1e-9);
        assert_eq!(report.satisfied(), Some(true));
    }

    #[test]
    fn povm_targets_suppress_the_bound() {
        let g = 0.5;
        let report = nonideality_report(&unsharp_grid(g, g), &unsharp_z(0.9), &x().to_povm()).unwrap();
        assert_eq!(report.bound, None);
        assert_eq!(report.satisfied(), None);
    }
}
