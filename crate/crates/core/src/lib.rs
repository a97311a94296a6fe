//! Finite-dimensional toolkit for generalized quantum measurements.
//!
//! The crate covers the numerical side of measurement theory for small
//! systems:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigendecomposition, SVD,
//!   Kronecker products and partial traces.
//! - [`states`]: state vectors, density operators, Schmidt decomposition.
//! - [`observables`]: PVMs, POVMs, POVM compilation from an object/apparatus
//!   interaction, outcome sampling, commutator uncertainty bound.
//! - [`joint_nonideal`]: bivariate POVMs, nonideality matrices, their
//!   entropies and the Martens bound.
//! - [`epr`]: joint and conditional probabilities for bipartite states,
//!   conditional preparation and contextual states.
//! - [`subquantum`]: hidden-variable and contextual trajectory models, CHSH
//!   evaluation, and the quadrivariate joint-distribution oracle.
//! - [`collectives`]: outcome sequences, place selection rules and
//!   homogeneity tests.
//!
//! The crate is `no_std` and only needs `alloc`. Randomness is always driven
//! by an explicit 64-bit seed, see [`random`].

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod collectives;
pub mod epr;
pub mod joint_nonideal;
pub mod linalg;
pub mod montecarlo;
pub mod observables;
pub mod random;
pub mod states;
pub mod stats;
pub mod subquantum;

pub use linalg::{ComplexMatrix, HermitianDecomposition, LinalgError, Subsystem};
pub use num_complex::Complex64;
pub use observables::{DiscretePOVM, DiscretePVM, MeasurementModel};
pub use states::{DensityOperator, SchmidtForm, StateVector};

/// Tolerance used for Hermiticity, normalization, idempotence and
/// completeness checks throughout the crate.
pub const TOLERANCE: f64 = 1e-10;
