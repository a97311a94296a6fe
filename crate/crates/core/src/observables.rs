//! Standard (PVM) and generalized (POVM) observables.
//!
//! A POVM can be given directly or compiled from a measurement model: an
//! object in state `ρ` interacts with an apparatus prepared in `ρ_a` through a
//! unitary `U` on object ⊗ apparatus, after which a pointer PVM `{E_m}` is read
//! on the apparatus. The object-side effects are
//!
//! ```text
//! M_m = Tr_a[(I ⊗ ρ_a) U† (I ⊗ E_m) U]
//! ```
//!
//! following the `U† E U` ordering literally (Heisenberg picture of the
//! pointer). With `ℏ = 1`, [`uncertainty_product`] implements the
//! finite-dimensional commutator bound `ΔA·ΔB ≥ |⟨[A,B]⟩|/2`.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use thiserror::Error;

use crate::collectives::OutcomeSequence;
use crate::linalg::{self, eig_hermitian, pauli, ComplexMatrix, LinalgError, Subsystem};
use crate::random;
use crate::states::DensityOperator;
use crate::TOLERANCE;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservableError {
    #[error("measurement has no outcomes")]
    Empty,
    #[error("{labels} labels for {effects} effects")]
    LabelCount { labels: usize, effects: usize },
    #[error("operator dimension {found} does not match {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator {index} is not Hermitian (deviation {deviation:e})")]
    NotHermitian { index: usize, deviation: f64 },
    #[error("operator {index} is not a projector (deviation {deviation:e})")]
    NotProjector { index: usize, deviation: f64 },
    #[error("projectors {first} and {second} are not orthogonal (overlap {overlap:e})")]
    NotOrthogonal {
        first: usize,
        second: usize,
        overlap: f64,
    },
    #[error("operators do not sum to the identity (deviation {0:e})")]
    Incomplete(f64),
    #[error("effect {index} has spectrum [{min}, {max}] outside [0, 1]")]
    EffectOutOfRange { index: usize, min: f64, max: f64 },
    #[error("interaction is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("sample count must be positive")]
    NoSamples,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn check_labels(labels: &[String], n: usize) -> Result<(), ObservableError> {
    if n == 0 {
        return Err(ObservableError::Empty);
    }
    if labels.len() != n {
        return Err(ObservableError::LabelCount {
            labels: labels.len(),
            effects: n,
        });
    }
    Ok(())
}

fn check_square_family(ops: &[ComplexMatrix]) -> Result<usize, ObservableError> {
    let d = ops[0].rows();
    for op in ops {
        if !op.is_square() || op.rows() != d {
            return Err(ObservableError::DimensionMismatch {
                expected: d,
                found: op.rows().max(op.cols()),
            });
        }
    }
    Ok(d)
}

fn check_completeness(ops: &[ComplexMatrix], d: usize) -> Result<(), ObservableError> {
    let total = linalg::sum_matrices(ops.iter()).expect("non-empty");
    let dev = total.distance(&ComplexMatrix::identity(d));
    if dev > TOLERANCE {
        return Err(ObservableError::Incomplete(dev));
    }
    Ok(())
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| alloc::format!("{i}")).collect()
}

/// Projection-valued measure: orthogonal projectors summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePVM {
    labels: Vec<String>,
    projectors: Vec<ComplexMatrix>,
}

impl DiscretePVM {
    pub fn new(labels: Vec<String>, projectors: Vec<ComplexMatrix>) -> Result<Self, ObservableError> {
        check_labels(&labels, projectors.len())?;
        let d = check_square_family(&projectors)?;
        for (index, p) in projectors.iter().enumerate() {
            let deviation = p.hermiticity_error()?;
            if deviation > TOLERANCE {
                return Err(ObservableError::NotHermitian { index, deviation });
            }
            let deviation = (p * p).distance(p);
            if deviation > TOLERANCE {
                return Err(ObservableError::NotProjector { index, deviation });
            }
        }
        for i in 0..projectors.len() {
            for j in i + 1..projectors.len() {
                let overlap = (&projectors[i] * &projectors[j]).frobenius_norm();
                if overlap > TOLERANCE {
                    return Err(ObservableError::NotOrthogonal {
                        first: i,
                        second: j,
                        overlap,
                    });
                }
            }
        }
        check_completeness(&projectors, d)?;
        let projectors = projectors.iter().map(ComplexMatrix::hermitian_part).collect();
        Ok(Self { labels, projectors })
    }

    /// Rank-one projectors onto an orthonormal basis, labelled `0..d`.
    pub fn from_basis(basis: &[Vec<Complex64>]) -> Result<Self, ObservableError> {
        let projectors = basis.iter().map(|v| ComplexMatrix::projector(v)).collect();
        Self::new(default_labels(basis.len()), projectors)
    }

    /// Measurement in the computational basis of C^d.
    pub fn computational(d: usize) -> Self {
        let projectors = (0..d)
            .map(|k| {
                let mut m = ComplexMatrix::zeros(d, d);
                m[(k, k)] = Complex64::new(1.0, 0.0);
                m
            })
            .collect();
        Self {
            labels: default_labels(d),
            projectors,
        }
    }

    /// Spectral measure of a Hermitian operator: one projector per distinct
    /// eigenvalue (clustered as in [`crate::linalg`]), in descending order,
    /// labelled by the eigenvalue.
    pub fn spectral(observable: &ComplexMatrix) -> Result<Self, ObservableError> {
        let dec = eig_hermitian(observable)?;
        let d = observable.rows();
        let mut labels = Vec::new();
        let mut projectors: Vec<ComplexMatrix> = Vec::new();
        let mut k = 0;
        while k < d {
            let value = dec.eigenvalues[k];
            let mut p = ComplexMatrix::zeros(d, d);
            while k < d && (dec.eigenvalues[k] - value).abs() < linalg::DEGENERACY_GAP {
                p = &p + &ComplexMatrix::projector(&dec.eigenvector(k));
                k += 1;
            }
            labels.push(alloc::format!("{value}"));
            projectors.push(p);
        }
        Self::new(labels, projectors)
    }

    /// Qubit spin along a real unit 3-vector: outcomes `+1` and `−1` with
    /// projectors `(I ± n·σ)/2`.
    pub fn spin(direction: [f64; 3]) -> Self {
        let n = direction;
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        assert!(len > 0.0, "spin direction must be nonzero");
        let n = [n[0] / len, n[1] / len, n[2] / len];
        let ns = pauli::dot_sigma(n);
        let id = ComplexMatrix::identity(2);
        Self {
            labels: alloc::vec![String::from("+1"), String::from("-1")],
            projectors: alloc::vec![(&id + &ns).scale_real(0.5), (&id - &ns).scale_real(0.5)],
        }
    }

    /// Spin along `(sin θ, 0, cos θ)`: angle measured from z in the x-z plane.
    pub fn spin_angle(theta: f64) -> Self {
        Self::spin([theta.sin(), 0.0, theta.cos()])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].rows()
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn to_povm(&self) -> DiscretePOVM {
        DiscretePOVM {
            labels: self.labels.clone(),
            effects: self.projectors.clone(),
        }
    }
}

/// Positive operator-valued measure: effects with spectrum in `[0, 1]`
/// summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePOVM {
    labels: Vec<String>,
    effects: Vec<ComplexMatrix>,
}

impl DiscretePOVM {
    pub fn new(labels: Vec<String>, effects: Vec<ComplexMatrix>) -> Result<Self, ObservableError> {
        check_labels(&labels, effects.len())?;
        let d = check_square_family(&effects)?;
        for (index, e) in effects.iter().enumerate() {
            let deviation = e.hermiticity_error()?;
            if deviation > TOLERANCE {
                return Err(ObservableError::NotHermitian { index, deviation });
            }
            let spec = eig_hermitian(e)?;
            let (min, max) = (spec.min_eigenvalue(), spec.max_eigenvalue());
            if min < -TOLERANCE || max > 1.0 + TOLERANCE {
                return Err(ObservableError::EffectOutOfRange { index, min, max });
            }
        }
        check_completeness(&effects, d)?;
        let effects = effects.iter().map(ComplexMatrix::hermitian_part).collect();
        Ok(Self { labels, effects })
    }

    /// Effects proportional to the identity, `{wₘ I}`.
    pub fn trivial(dim: usize, weights: &[f64]) -> Result<Self, ObservableError> {
        let effects = weights
            .iter()
            .map(|&w| ComplexMatrix::identity(dim).scale_real(w))
            .collect();
        Self::new(default_labels(weights.len()), effects)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0].rows()
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// Whether every effect is a projector (within [`TOLERANCE`]) and distinct
    /// effects are orthogonal.
    pub fn as_pvm(&self) -> Option<DiscretePVM> {
        DiscretePVM::new(self.labels.clone(), self.effects.clone()).ok()
    }
}

impl From<DiscretePVM> for DiscretePOVM {
    fn from(p: DiscretePVM) -> Self {
        DiscretePOVM {
            labels: p.labels,
            effects: p.projectors,
        }
    }
}

/// Object/apparatus interaction followed by a pointer reading.
#[derive(Debug, Clone)]
pub struct MeasurementModel {
    apparatus_initial: DensityOperator,
    interaction: ComplexMatrix,
    pointer_pvm: DiscretePVM,
}

impl MeasurementModel {
    pub fn new(
        apparatus_initial: DensityOperator,
        interaction: ComplexMatrix,
        pointer_pvm: DiscretePVM,
    ) -> Result<Self, ObservableError> {
        let dev = interaction.unitarity_error()?;
        if dev > TOLERANCE {
            return Err(ObservableError::NotUnitary(dev));
        }
        if pointer_pvm.dim() != apparatus_initial.dim() {
            return Err(ObservableError::DimensionMismatch {
                expected: apparatus_initial.dim(),
                found: pointer_pvm.dim(),
            });
        }
        if !interaction.rows().is_multiple_of(apparatus_initial.dim()) {
            return Err(ObservableError::DimensionMismatch {
                expected: apparatus_initial.dim(),
                found: interaction.rows(),
            });
        }
        Ok(Self {
            apparatus_initial,
            interaction,
            pointer_pvm,
        })
    }

    pub fn apparatus_initial(&self) -> &DensityOperator {
        &self.apparatus_initial
    }

    pub fn interaction(&self) -> &ComplexMatrix {
        &self.interaction
    }

    pub fn pointer_pvm(&self) -> &DiscretePVM {
        &self.pointer_pvm
    }

    pub fn apparatus_dim(&self) -> usize {
        self.apparatus_initial.dim()
    }
}

fn check_dim(expected: usize, found: usize) -> Result<(), ObservableError> {
    if expected != found {
        return Err(ObservableError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Outcome probabilities `pₘ = Tr(ρ Mₘ)`, clipped to `[0, 1]`.
pub fn probabilities(rho: &DensityOperator, povm: &DiscretePOVM) -> Result<Vec<f64>, ObservableError> {
    check_dim(povm.dim(), rho.dim())?;
    Ok(povm
        .effects
        .iter()
        .map(|m| rho.expectation(m).re.clamp(0.0, 1.0))
        .collect())
}

/// Object-side POVM of a measurement model.
///
/// Effects are checked, not clipped: a compiled effect with an eigenvalue
/// below `−1e-10` means the model is broken and is reported as an error.
pub fn compile_povm(model: &MeasurementModel, object_dim: usize) -> Result<DiscretePOVM, ObservableError> {
    let da = model.apparatus_dim();
    check_dim(model.interaction.rows(), object_dim * da)?;
    let id_o = ComplexMatrix::identity(object_dim);
    let rho_a = linalg::tensor_product(&id_o, model.apparatus_initial.matrix())?;
    let u = &model.interaction;
    let u_dag = u.adjoint();
    let mut effects = Vec::with_capacity(model.pointer_pvm.len());
    for e in model.pointer_pvm.projectors() {
        let lifted = linalg::tensor_product(&id_o, e)?;
        let heis = &(&u_dag * &lifted) * u;
        let m = linalg::partial_trace(&(&rho_a * &heis), (object_dim, da), Subsystem::First)?;
        effects.push(m.hermitian_part());
    }
    DiscretePOVM::new(model.pointer_pvm.labels.clone(), effects)
}

/// `n` i.i.d. outcome indices drawn from `probabilities(rho, povm)`.
///
/// Draws come from `random::stream(seed, "observables/sample", 0)`.
pub fn sample(
    rho: &DensityOperator,
    povm: &DiscretePOVM,
    n: usize,
    seed: u64,
) -> Result<OutcomeSequence, ObservableError> {
    if n == 0 {
        return Err(ObservableError::NoSamples);
    }
    let p = probabilities(rho, povm)?;
    let mut rng = random::stream(seed, "observables/sample", 0);
    let values = (0..n).map(|_| draw_index(&mut rng, &p)).collect();
    Ok(OutcomeSequence::new(values))
}

/// Inverse-CDF draw of an index from (approximately normalized) weights.
pub(crate) fn draw_index<R: Rng + ?Sized>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
        }
        acc += w;
        if u < acc {
            return i;
        }
    }
    last_positive
}

/// Standard deviations of two observables and their commutator bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uncertainty {
    pub delta_a: f64,
    pub delta_b: f64,
    /// `|⟨[A,B]⟩|/2`.
    pub bound: f64,
}

impl Uncertainty {
    pub fn product(&self) -> f64 {
        self.delta_a * self.delta_b
    }

    pub fn holds(&self) -> bool {
        self.product() >= self.bound - TOLERANCE
    }
}

fn deviation(rho: &DensityOperator, a: &ComplexMatrix) -> f64 {
    let mean = rho.expectation(a).re;
    let shifted = a - &ComplexMatrix::identity(a.rows()).scale_real(mean);
    rho.expectation(&(&shifted * &shifted)).re.max(0.0).sqrt()
}

/// `ΔA`, `ΔB` with `(ΔA)² = ⟨(A − ⟨A⟩)²⟩`, and `|⟨[A,B]⟩|/2`.
pub fn uncertainty_product(
    rho: &DensityOperator,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<Uncertainty, ObservableError> {
    for (index, op) in [a, b].into_iter().enumerate() {
        check_dim(rho.dim(), op.rows())?;
        let deviation = op.hermiticity_error()?;
        if deviation > TOLERANCE {
            return Err(ObservableError::NotHermitian { index, deviation });
        }
    }
    let comm = a.commutator(b);
    Ok(Uncertainty {
        delta_a: deviation(rho, a),
        delta_b: deviation(rho, b),
        bound: rho.expectation(&comm).norm() / 2.0,
    })
}

/// True iff every pair of effects commutes within [`TOLERANCE`].
pub fn is_compatible(p: &DiscretePOVM, q: &DiscretePOVM) -> Result<bool, ObservableError> {
    check_dim(p.dim(), q.dim())?;
    Ok(p.effects.iter().all(|a| {
        q.effects
            .iter()
            .all(|b| a.commutator(b).frobenius_norm() <= TOLERANCE)
    }))
}
