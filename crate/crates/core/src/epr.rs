//! EPR-type two-particle scenarios.
//!
//! Conditional preparation is computed from first principles, project and
//! trace:
//!
//! ```text
//! ρ₂ᵢ = Tr₁[(Pᵢ ⊗ I) |ψ⟩⟨ψ| (Pᵢ ⊗ I)] / p(a₁ᵢ)
//! ```
//!
//! so the fact that a Schmidt-basis measurement on particle 1 leaves particle
//! 2 in the partner Schmidt vector is something the tests check, not an
//! assumption of the code. Projectors of rank above one are allowed; the
//! prepared state is then mixed in general.
//!
//! The contextual state `ρ_A = Σₘ Pₘ ρ Pₘ` is only a state transform. It
//! reproduces the probabilities of the context's PVM and nothing is claimed
//! about dynamics.

use alloc::vec::Vec;

use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, LinalgError, Subsystem};
use crate::observables::DiscretePVM;
use crate::states::{density_from_pure, DensityOperator, StateError, StateVector};

/// Marginal probabilities at or below this are treated as zero.
pub const MIN_CONDITIONING_PROBABILITY: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EprError {
    #[error("bipartite dimension mismatch: state has dimension {state}, observables act on {first} x {second}")]
    DimensionMismatch {
        state: usize,
        first: usize,
        second: usize,
    },
    #[error("conditioning outcome {outcome} has probability {probability:e}")]
    ZeroProbability { outcome: usize, probability: f64 },
    #[error("outcome index {outcome} out of range ({count} outcomes)")]
    NoSuchOutcome { outcome: usize, count: usize },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A bipartite pure state with one PVM per particle.
#[derive(Debug, Clone)]
pub struct EPRScenario {
    pub state: StateVector,
    pub first_observable: DiscretePVM,
    pub second_observable: DiscretePVM,
}

impl EPRScenario {
    pub fn new(
        state: StateVector,
        first_observable: DiscretePVM,
        second_observable: DiscretePVM,
    ) -> Result<Self, EprError> {
        let (d1, d2) = (first_observable.dim(), second_observable.dim());
        if state.dim() != d1 * d2 {
            return Err(EprError::DimensionMismatch {
                state: state.dim(),
                first: d1,
                second: d2,
            });
        }
        Ok(Self {
            state,
            first_observable,
            second_observable,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.first_observable.dim(), self.second_observable.dim())
    }
}

/// Joint outcome distribution; rows index particle-1 outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct JointGrid {
    pub probabilities: Vec<Vec<f64>>,
}

impl JointGrid {
    pub fn rows(&self) -> usize {
        self.probabilities.len()
    }

    pub fn cols(&self) -> usize {
        self.probabilities.first().map_or(0, Vec::len)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.probabilities[i][j]
    }

    /// Particle-1 marginal `p(a₁ᵢ)`.
    pub fn row_marginal(&self) -> Vec<f64> {
        self.probabilities.iter().map(|r| r.iter().sum()).collect()
    }

    /// Particle-2 marginal.
    pub fn col_marginal(&self) -> Vec<f64> {
        (0..self.cols())
            .map(|j| self.probabilities.iter().map(|r| r[j]).sum())
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().flatten().sum()
    }
}

/// `p(a₁ᵢ, f₂ⱼ) = ⟨ψ| Pᵢ ⊗ Qⱼ |ψ⟩`, which for rank-one projectors is
/// `|⟨ψ|αᵢ φⱼ⟩|²`.
pub fn joint_probability(s: &EPRScenario) -> Result<JointGrid, EprError> {
    joint_probability_parts(&s.state, &s.first_observable, &s.second_observable)
}

pub(crate) fn joint_probability_parts(
    state: &StateVector,
    first: &DiscretePVM,
    second: &DiscretePVM,
) -> Result<JointGrid, EprError> {
    let (d1, d2) = (first.dim(), second.dim());
    if state.dim() != d1 * d2 {
        return Err(EprError::DimensionMismatch {
            state: state.dim(),
            first: d1,
            second: d2,
        });
    }
    let psi = state.amplitudes();
    let probabilities = first
        .projectors()
        .iter()
        .map(|p| {
            second
                .projectors()
                .iter()
                .map(|q| {
                    let pq = linalg::tensor_product(p, q).expect("dimensions bounded by state");
                    linalg::dot(psi, &pq.mul_vec(psi)).re.clamp(0.0, 1.0)
                })
                .collect()
        })
        .collect();
    Ok(JointGrid { probabilities })
}

/// `p(f₂ⱼ | a₁ᵢ) = p(a₁ᵢ, f₂ⱼ) / p(a₁ᵢ)`.
pub fn conditional_probability(grid: &JointGrid, condition_outcome: usize) -> Result<Vec<f64>, EprError> {
    let row = grid.probabilities.get(condition_outcome).ok_or(EprError::NoSuchOutcome {
        outcome: condition_outcome,
        count: grid.rows(),
    })?;
    let marginal: f64 = row.iter().sum();
    if marginal <= MIN_CONDITIONING_PROBABILITY {
        return Err(EprError::ZeroProbability {
            outcome: condition_outcome,
            probability: marginal,
        });
    }
    Ok(row.iter().map(|p| p / marginal).collect())
}

fn split_dims(state: &StateVector, first_dim: usize) -> Result<(usize, usize), EprError> {
    if first_dim == 0 || !state.dim().is_multiple_of(first_dim) {
        return Err(EprError::DimensionMismatch {
            state: state.dim(),
            first: first_dim,
            second: 0,
        });
    }
    Ok((first_dim, state.dim() / first_dim))
}

/// Particle-2 state selected by outcome `outcome` of `first_pvm` on particle 1.
pub fn conditionally_prepared_state(
    state: &StateVector,
    first_pvm: &DiscretePVM,
    outcome: usize,
) -> Result<DensityOperator, EprError> {
    let dims = split_dims(state, first_pvm.dim())?;
    let p = first_pvm.projectors().get(outcome).ok_or(EprError::NoSuchOutcome {
        outcome,
        count: first_pvm.len(),
    })?;
    let lifted = linalg::tensor_product(p, &ComplexMatrix::identity(dims.1))?;
    let projected = lifted.mul_vec(state.amplitudes());
    let probability: f64 = projected.iter().map(|z| z.norm_sqr()).sum();
    if probability <= MIN_CONDITIONING_PROBABILITY {
        return Err(EprError::ZeroProbability { outcome, probability });
    }
    let unnormalized = ComplexMatrix::projector(&projected);
    let reduced = linalg::partial_trace(&unnormalized, dims, Subsystem::Second)?;
    Ok(DensityOperator::new(reduced.scale_real(1.0 / probability))?)
}

/// `ρ_A = Σₘ Pₘ ρ Pₘ`.
pub fn contextual_state(rho: &DensityOperator, pvm: &DiscretePVM) -> Result<DensityOperator, EprError> {
    if rho.dim() != pvm.dim() {
        return Err(EprError::DimensionMismatch {
            state: rho.dim(),
            first: pvm.dim(),
            second: 1,
        });
    }
    let mut out = ComplexMatrix::zeros(rho.dim(), rho.dim());
    for p in pvm.projectors() {
        out = &out + &(&(p * rho.matrix()) * p);
    }
    Ok(DensityOperator::from_trusted(out))
}

/// Contextual state of the pair in the context of `A₁ ⊗ B₂`:
/// `Σᵢⱼ (Pᵢ ⊗ Qⱼ) |ψ⟩⟨ψ| (Pᵢ ⊗ Qⱼ)`. For rank-one projectors this is
/// `Σᵢⱼ |⟨ψ|αᵢβⱼ⟩|² |αᵢβⱼ⟩⟨αᵢβⱼ|`.
pub fn two_particle_contextual_state(
    state: &StateVector,
    a: &DiscretePVM,
    b: &DiscretePVM,
) -> Result<DensityOperator, EprError> {
    if state.dim() != a.dim() * b.dim() {
        return Err(EprError::DimensionMismatch {
            state: state.dim(),
            first: a.dim(),
            second: b.dim(),
        });
    }
    let rho = density_from_pure(state);
    let n = state.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for p in a.projectors() {
        for q in b.projectors() {
            let pq = linalg::tensor_product(p, q)?;
            out = &out + &(&(&pq * rho.matrix()) * &pq);
        }
    }
    Ok(DensityOperator::from_trusted(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{reduce, schmidt_decompose};
    use core::f64::consts::FRAC_1_SQRT_2;

    fn z() -> DiscretePVM {
        DiscretePVM::computational(2)
    }

    fn x() -> DiscretePVM {
        DiscretePVM::spin([1.0, 0.0, 0.0])
    }

    fn grid_close(g: &JointGrid, expected: &[[f64; 2]; 2]) -> bool {
        (0..2).all(|i| (0..2).all(|j| (g.get(i, j) - expected[i][j]).abs() < 1e-15))
    }

    #[test]
    fn product_state_has_sharp_grid() {
        let s = StateVector::product(&StateVector::basis(2, 1), &StateVector::basis(2, 0));
        let g = joint_probability(&EPRScenario::new(s, z(), z()).unwrap()).unwrap();
        assert!(grid_close(&g, &[[0.0, 0.0], [1.0, 0.0]]));
    }

    #[test]
    fn singlet_grids() {
        let zz = joint_probability(&EPRScenario::new(StateVector::singlet(), z(), z()).unwrap()).unwrap();
        assert!(grid_close(&zz, &[[0.0, 0.5], [0.5, 0.0]]));
        let zx = joint_probability(&EPRScenario::new(StateVector::singlet(), z(), x()).unwrap()).unwrap();
        assert!(grid_close(&zx, &[[0.25, 0.25], [0.25, 0.25]]));
        assert!((zx.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scenario_rejects_mismatched_dimensions() {
        assert!(matches!(
            EPRScenario::new(StateVector::singlet(), DiscretePVM::computational(3), z()),
            Err(EprError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn conditionals() {
        let zz = joint_probability(&EPRScenario::new(StateVector::singlet(), z(), z()).unwrap()).unwrap();
        let c = conditional_probability(&zz, 0).unwrap();
        assert_eq!(c, [0.0, 1.0]);

        let indep = JointGrid {
            probabilities: alloc::vec![alloc::vec![0.12, 0.28], alloc::vec![0.18, 0.42]],
        };
        let c = conditional_probability(&indep, 1).unwrap();
        let col = indep.col_marginal();
        assert!((c[0] - col[0]).abs() < 1e-15 && (c[1] - col[1]).abs() < 1e-15);

        let sharp = JointGrid {
            probabilities: alloc::vec![alloc::vec![1.0, 0.0], alloc::vec![0.0, 0.0]],
        };
        assert!(matches!(
            conditional_probability(&sharp, 1),
            Err(EprError::ZeroProbability { outcome: 1, .. })
        ));
    }

    #[test]
    fn singlet_conditioned_on_up_prepares_down() {
        let rho2 = conditionally_prepared_state(&StateVector::singlet(), &z(), 0).unwrap();
        let down = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        assert!(rho2.matrix().distance(&down) < 1e-15);
    }

    #[test]
    fn schmidt_measurement_prepares_partner_vector() {
        let h = FRAC_1_SQRT_2;
        let psi = StateVector::normalized(
            [0.3, 0.5, -0.2, 0.7]
                .iter()
                .map(|&x| num_complex::Complex64::new(x, h * x * x))
                .collect(),
        )
        .unwrap();
        let form = schmidt_decompose(&psi, (2, 2)).unwrap();
        let pvm = form.left_pvm();
        for i in 0..form.rank() {
            let rho2 = conditionally_prepared_state(&psi, &pvm, i).unwrap();
            let beta = ComplexMatrix::projector(form.right_basis[i].amplitudes());
            assert!(rho2.matrix().distance(&beta) < 1e-12);
        }
    }

    #[test]
    fn product_state_second_factor_unchanged() {
        let b = StateVector::from_real(&[0.6, 0.8]).unwrap();
        let psi = StateVector::product(&StateVector::from_real(&[h(), h()]).unwrap(), &b);
        for outcome in 0..2 {
            let rho2 = conditionally_prepared_state(&psi, &z(), outcome).unwrap();
            assert!(rho2.matrix().distance(density_from_pure(&b).matrix()) < 1e-15);
        }
        let sharp = StateVector::product(&StateVector::basis(2, 0), &b);
        assert!(matches!(
            conditionally_prepared_state(&sharp, &z(), 1),
            Err(EprError::ZeroProbability { .. })
        ));
    }

    fn h() -> f64 {
        FRAC_1_SQRT_2
    }

    #[test]
    fn contextual_state_examples() {
        let diag = DensityOperator::new(ComplexMatrix::from_real_diagonal(&[0.3, 0.7])).unwrap();
        assert!(contextual_state(&diag, &z()).unwrap().matrix().distance(diag.matrix()) < 1e-15);

        let plus = density_from_pure(&StateVector::from_real(&[h(), h()]).unwrap());
        let ctx = contextual_state(&plus, &z()).unwrap();
        assert!(ctx.matrix().distance(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);

        // |β⟩⟨β| in the context of {|φⱼ⟩⟨φⱼ|}: Σⱼ |⟨β|φⱼ⟩|² |φⱼ⟩⟨φⱼ|.
        let beta = StateVector::from_real(&[0.6, 0.8]).unwrap();
        let f = DiscretePVM::spin_angle(0.9);
        let ctx = contextual_state(&density_from_pure(&beta), &f).unwrap();
        let mut expected = ComplexMatrix::zeros(2, 2);
        for p in f.projectors() {
            let w = density_from_pure(&beta).expectation(p).re;
            expected = &expected + &p.scale_real(w);
        }
        assert!(ctx.matrix().distance(&expected) < 1e-15);
    }

    #[test]
    fn two_particle_contextual_singlet() {
        let ctx = two_particle_contextual_state(&StateVector::singlet(), &z(), &z()).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[0.0, 0.5, 0.5, 0.0]);
        assert!(ctx.matrix().distance(&expected) < 1e-15);

        let prod = StateVector::product(&StateVector::basis(2, 0), &StateVector::basis(2, 1));
        let ctx = two_particle_contextual_state(&prod, &z(), &z()).unwrap();
        assert!(ctx.matrix().distance(density_from_pure(&prod).matrix()) < 1e-15);
    }

    #[test]
    fn reduced_two_particle_context_is_local_context() {
        let psi = StateVector::normalized(
            [0.1, -0.4, 0.5, 0.2, 0.6, -0.3]
                .iter()
                .map(|&x| num_complex::Complex64::new(x, 0.5 - x))
                .collect(),
        )
        .unwrap();
        let a = DiscretePVM::spin_angle(0.4);
        let b = DiscretePVM::computational(3);
        let two = two_particle_contextual_state(&psi, &a, &b).unwrap();
        let rho = density_from_pure(&psi);
        let lhs = reduce(&two, (2, 3), Subsystem::First).unwrap();
        let rhs = contextual_state(&reduce(&rho, (2, 3), Subsystem::First).unwrap(), &a).unwrap();
        assert!(lhs.matrix().distance(rhs.matrix()) < 1e-14);
    }
}
