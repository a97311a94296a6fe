//! Pure states, density operators and the Schmidt decomposition of
//! bipartite vectors.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;
use thiserror::Error;

use crate::linalg::{
    self, eig_hermitian, partial_trace, svd, tensor_vec, ComplexMatrix, HermitianDecomposition,
    LinalgError, Subsystem,
};
use crate::observables::DiscretePVM;
use crate::TOLERANCE;

/// Schmidt coefficients at or below this value are not counted in the rank.
pub const SCHMIDT_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("state vector norm is {0}, expected 1")]
    NotNormalized(f64),
    #[error("density operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("density operator trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("density operator has negative eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("state of dimension {found} does not factor as {dims:?}")]
    DimensionMismatch { dims: (usize, usize), found: usize },
    #[error("empty state")]
    Empty,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Normalized vector in C^d.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Accepts amplitudes whose squared norm is within [`TOLERANCE`] of one.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        if amplitudes.is_empty() {
            return Err(StateError::Empty);
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite.into());
        }
        let n2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (n2 - 1.0).abs() > TOLERANCE {
            return Err(StateError::NotNormalized(n2.sqrt()));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        let n = linalg::norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(StateError::NotNormalized(n));
        }
        Self::new(amplitudes.into_iter().map(|z| z / n).collect())
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self, StateError> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|k⟩` in C^d.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        let mut a = alloc::vec![Complex64::zero(); dim];
        a[k] = Complex64::new(1.0, 0.0);
        Self { amplitudes: a }
    }

    /// `(|01⟩ − |10⟩)/√2`.
    pub fn singlet() -> Self {
        let h = FRAC_1_SQRT_2;
        Self::from_real(&[0.0, h, -h, 0.0]).expect("normalized")
    }

    /// `|a⟩ ⊗ |b⟩`.
    pub fn product(a: &StateVector, b: &StateVector) -> Self {
        Self {
            amplitudes: tensor_vec(&a.amplitudes, &b.amplitudes),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        linalg::dot(&self.amplitudes, &other.amplitudes)
    }

    /// Fidelity-style overlap `|⟨self|other⟩|`, insensitive to global phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }
}

/// Trace-one positive semidefinite Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and numerical positivity, each within
    /// [`TOLERANCE`], then symmetrizes.
    pub fn new(matrix: ComplexMatrix) -> Result<Self, StateError> {
        let herr = matrix.hermiticity_error()?;
        if herr > TOLERANCE {
            return Err(StateError::NotHermitian(herr));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TOLERANCE || tr.im.abs() > TOLERANCE {
            return Err(StateError::BadTrace(tr.re));
        }
        let matrix = matrix.hermitian_part();
        let min = eig_hermitian(&matrix)?.min_eigenvalue();
        if min < -TOLERANCE {
            return Err(StateError::NotPositive(min));
        }
        Ok(Self { matrix })
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// `Σ wᵢ |ψᵢ⟩⟨ψᵢ|` for weights summing to one.
    pub fn mixture(components: &[(f64, StateVector)]) -> Result<Self, StateError> {
        let dim = components.first().ok_or(StateError::Empty)?.1.dim();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for (w, psi) in components {
            if psi.dim() != dim {
                return Err(StateError::DimensionMismatch {
                    dims: (dim, 1),
                    found: psi.dim(),
                });
            }
            m = &m + &ComplexMatrix::projector(psi.amplitudes()).scale_real(*w);
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    pub fn spectrum(&self) -> HermitianDecomposition {
        eig_hermitian(&self.matrix).expect("density operators are Hermitian")
    }

    /// `Tr(ρ A)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Complex64 {
        self.matrix.trace_product(op)
    }

    /// `ρ ⊗ σ`.
    pub fn tensor(&self, other: &DensityOperator) -> Result<Self, StateError> {
        Ok(Self {
            matrix: linalg::tensor_product(&self.matrix, &other.matrix)?,
        })
    }

    /// Builds without validation; callers guarantee the invariants.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
        }
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn density_from_pure(v: &StateVector) -> DensityOperator {
    DensityOperator {
        matrix: ComplexMatrix::projector(v.amplitudes()),
    }
}

/// Biorthogonal expansion `|ψ⟩ = Σᵢ cᵢ |αᵢ⟩|βᵢ⟩` of a bipartite vector.
///
/// When coefficients coincide (the singlet, for instance) the bases are only
/// fixed up to a unitary inside each degenerate block; the returned bases
/// follow the canonical convention of [`crate::linalg`], but any rotation
/// within the block is an equally valid Schmidt form.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    pub dims: (usize, usize),
    /// Descending, all above [`SCHMIDT_CUTOFF`].
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<StateVector>,
    pub right_basis: Vec<StateVector>,
}

impl SchmidtForm {
    /// Number of nonzero Schmidt coefficients. Entanglement is reported only
    /// through this rank; no entanglement monotone is defined.
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_entangled(&self) -> bool {
        self.rank() > 1
    }

    pub fn reconstruct(&self) -> StateVector {
        let dim = self.dims.0 * self.dims.1;
        let mut amps = alloc::vec![Complex64::zero(); dim];
        for ((c, a), b) in self.coefficients.iter().zip(&self.left_basis).zip(&self.right_basis) {
            for (x, y) in amps.iter_mut().zip(tensor_vec(a.amplitudes(), b.amplitudes())) {
                *x += y * *c;
            }
        }
        StateVector::normalized(amps).expect("nonzero reconstruction")
    }

    /// PVM of rank-one projectors onto the left Schmidt vectors, completed by
    /// the projector onto their orthogonal complement when the rank is below
    /// the left dimension.
    pub fn left_pvm(&self) -> DiscretePVM {
        schmidt_pvm(&self.left_basis, self.dims.0)
    }

    pub fn right_pvm(&self) -> DiscretePVM {
        schmidt_pvm(&self.right_basis, self.dims.1)
    }
}

fn schmidt_pvm(basis: &[StateVector], dim: usize) -> DiscretePVM {
    let mut projectors: Vec<ComplexMatrix> = basis
        .iter()
        .map(|v| ComplexMatrix::projector(v.amplitudes()))
        .collect();
    if basis.len() < dim {
        let covered = linalg::sum_matrices(projectors.iter()).expect("rank >= 1");
        projectors.push(&ComplexMatrix::identity(dim) - &covered);
    }
    let labels = (0..projectors.len()).map(|i| alloc::format!("{i}")).collect();
    DiscretePVM::new(labels, projectors).expect("Schmidt vectors are orthonormal")
}

/// Schmidt decomposition through the SVD of the coefficient matrix
/// `C[i][j] = ⟨i j|ψ⟩`.
pub fn schmidt_decompose(v: &StateVector, dims: (usize, usize)) -> Result<SchmidtForm, StateError> {
    linalg::check_factor_dims(dims)?;
    if v.dim() != dims.0 * dims.1 {
        return Err(StateError::DimensionMismatch {
            dims,
            found: v.dim(),
        });
    }
    let (d1, d2) = dims;
    let coeffs = ComplexMatrix::from_fn(d1, d2, |i, j| v.amplitudes()[i * d2 + j]);
    let dec = svd(&coeffs)?;
    let mut form = SchmidtForm {
        dims,
        coefficients: Vec::new(),
        left_basis: Vec::new(),
        right_basis: Vec::new(),
    };
    for (k, &s) in dec.singular_values.iter().enumerate() {
        if s <= SCHMIDT_CUTOFF {
            continue;
        }
        // C = Σ s u v†  ⇒  ψ = Σ s |u⟩ ⊗ |v*⟩
        let alpha = dec.u.column(k);
        let beta: Vec<Complex64> = dec.v.column(k).iter().map(|z| z.conj()).collect();
        form.coefficients.push(s);
        form.left_basis.push(StateVector::normalized(alpha)?);
        form.right_basis.push(StateVector::normalized(beta)?);
    }
    Ok(form)
}

/// Reduced state of one factor of a bipartite density operator.
pub fn reduce(
    rho: &DensityOperator,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<DensityOperator, StateError> {
    if rho.dim() != dims.0 * dims.1 {
        return Err(StateError::DimensionMismatch {
            dims,
            found: rho.dim(),
        });
    }
    let m = partial_trace(&rho.matrix, dims, keep)?;
    Ok(DensityOperator::from_trusted(m))
}
