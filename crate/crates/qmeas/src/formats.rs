//! JSON shapes for states, observables and matrices.
//!
//! Complex numbers are `[re, im]` pairs and matrices are arrays of rows.
//! States and observables accept a few named presets besides the explicit
//! forms.

use serde::{Deserialize, Serialize};

use qmeas_core::joint_nonideal::BivariatePOVM;
use qmeas_core::linalg::pauli;
use qmeas_core::{Complex64, ComplexMatrix, DiscretePOVM, DiscretePVM, StateVector};

use crate::RunError;

pub type ComplexJson = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexJson>>;

pub fn complex_from_json(z: &ComplexJson) -> Complex64 {
    Complex64::new(z[0], z[1])
}

pub fn matrix_from_json(m: &MatrixJson) -> Result<ComplexMatrix, RunError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(RunError::Schema("matrix must be a non-empty rectangular array of [re, im] rows".into()));
    }
    let data = m.iter().flatten().map(complex_from_json).collect();
    ComplexMatrix::new(rows, cols, data).map_err(schema)
}

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub(crate) fn schema<E: std::fmt::Display>(e: E) -> RunError {
    RunError::Schema(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum StateSpec {
    /// `singlet`, `phi_plus`, `zero`, `one`, `plus`, `minus`.
    Preset(String),
    Amplitudes {
        amplitudes: Vec<ComplexJson>,
        #[serde(default)]
        normalize: bool,
    },
    Basis {
        dim: usize,
        index: usize,
    },
    Product {
        product: Vec<StateSpec>,
    },
}

impl StateSpec {
    pub fn build(&self) -> Result<StateVector, RunError> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Self::Preset(name) => match name.as_str() {
                "singlet" => Ok(StateVector::singlet()),
                "phi_plus" => StateVector::from_real(&[h, 0.0, 0.0, h]).map_err(schema),
                "zero" => Ok(StateVector::basis(2, 0)),
                "one" => Ok(StateVector::basis(2, 1)),
                "plus" => StateVector::from_real(&[h, h]).map_err(schema),
                "minus" => StateVector::from_real(&[h, -h]).map_err(schema),
                other => Err(RunError::Schema(format!("unknown state preset `{other}`"))),
            },
            Self::Amplitudes { amplitudes, normalize } => {
                let amps = amplitudes.iter().map(complex_from_json).collect();
                if *normalize {
                    StateVector::normalized(amps)
                } else {
                    StateVector::new(amps)
                }
                .map_err(schema)
            }
            Self::Basis { dim, index } => {
                if *index >= *dim {
                    return Err(RunError::Schema(format!("basis index {index} out of range for dimension {dim}")));
                }
                Ok(StateVector::basis(*dim, *index))
            }
            Self::Product { product } => {
                let mut factors = product.iter().map(StateSpec::build);
                let first = factors
                    .next()
                    .ok_or_else(|| RunError::Schema("empty product state".into()))??;
                factors.try_fold(first, |acc, f| Ok(StateVector::product(&acc, &f?)))
            }
        }
    }
}

/// Either a projective measurement or a general POVM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ObservableSpec {
    /// `x`, `y`, `z`.
    Preset(String),
    SpinAngle {
        spin_angle: f64,
    },
    Spin {
        spin: [f64; 3],
    },
    Computational {
        computational: usize,
    },
    Basis {
        basis: Vec<Vec<ComplexJson>>,
    },
    Projectors {
        #[serde(default)]
        labels: Option<Vec<String>>,
        projectors: Vec<MatrixJson>,
    },
    Effects {
        #[serde(default)]
        labels: Option<Vec<String>>,
        effects: Vec<MatrixJson>,
    },
}

fn labels_or_default(labels: &Option<Vec<String>>, n: usize) -> Vec<String> {
    labels.clone().unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect())
}

impl ObservableSpec {
    pub fn build_povm(&self) -> Result<DiscretePOVM, RunError> {
        match self {
            Self::Effects { labels, effects } => {
                let effects = effects.iter().map(matrix_from_json).collect::<Result<Vec<_>, _>>()?;
                DiscretePOVM::new(labels_or_default(labels, effects.len()), effects).map_err(schema)
            }
            other => Ok(other.build_pvm()?.to_povm()),
        }
    }

    pub fn build_pvm(&self) -> Result<DiscretePVM, RunError> {
        match self {
            Self::Preset(name) => match name.as_str() {
                "x" => Ok(DiscretePVM::spin([1.0, 0.0, 0.0])),
                "y" => Ok(DiscretePVM::spin([0.0, 1.0, 0.0])),
                "z" => Ok(DiscretePVM::spin([0.0, 0.0, 1.0])),
                other => Err(RunError::Schema(format!("unknown observable preset `{other}`"))),
            },
            Self::SpinAngle { spin_angle } => Ok(DiscretePVM::spin_angle(*spin_angle)),
            Self::Spin { spin } => {
                if spin.iter().all(|x| *x == 0.0) || spin.iter().any(|x| !x.is_finite()) {
                    return Err(RunError::Schema("spin direction must be finite and nonzero".into()));
                }
                Ok(DiscretePVM::spin(*spin))
            }
            Self::Computational { computational } => {
                if *computational == 0 {
                    return Err(RunError::Schema("dimension must be positive".into()));
                }
                Ok(DiscretePVM::computational(*computational))
            }
            Self::Basis { basis } => {
                let basis: Vec<Vec<Complex64>> = basis
                    .iter()
                    .map(|v| v.iter().map(complex_from_json).collect())
                    .collect();
                DiscretePVM::from_basis(&basis).map_err(schema)
            }
            Self::Projectors { labels, projectors } => {
                let projectors = projectors.iter().map(matrix_from_json).collect::<Result<Vec<_>, _>>()?;
                DiscretePVM::new(labels_or_default(labels, projectors.len()), projectors).map_err(schema)
            }
            Self::Effects { .. } => Err(RunError::Schema("a projective measurement is required here".into())),
        }
    }
}

/// Grid of effects, or the unsharp joint spin measurement
/// `R_mn = ¼(I + m γ_z σz + n γ_x σx)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum BivariateSpec {
    Effects {
        #[serde(default)]
        row_labels: Option<Vec<String>>,
        #[serde(default)]
        col_labels: Option<Vec<String>>,
        effects: Vec<Vec<MatrixJson>>,
    },
    UnsharpSpin {
        unsharp_spin: UnsharpSpin,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnsharpSpin {
    pub gamma_z: f64,
    pub gamma_x: f64,
}

impl BivariateSpec {
    pub fn build(&self) -> Result<BivariatePOVM, RunError> {
        match self {
            Self::Effects {
                row_labels,
                col_labels,
                effects,
            } => {
                let grid = effects
                    .iter()
                    .map(|row| row.iter().map(matrix_from_json).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                let rows = grid.len();
                let cols = grid.first().map_or(0, Vec::len);
                BivariatePOVM::new(labels_or_default(row_labels, rows), labels_or_default(col_labels, cols), grid)
                    .map_err(schema)
            }
            Self::UnsharpSpin { unsharp_spin } => {
                let signs = [1.0, -1.0];
                let grid = signs
                    .iter()
                    .map(|&m| {
                        signs
                            .iter()
                            .map(|&n| {
                                let v = [n * unsharp_spin.gamma_x, 0.0, m * unsharp_spin.gamma_z];
                                (&pauli::identity2() + &pauli::dot_sigma(v)).scale_real(0.25)
                            })
                            .collect()
                    })
                    .collect();
                let labels = || vec!["+1".to_string(), "-1".to_string()];
                BivariatePOVM::new(labels(), labels(), grid).map_err(schema)
            }
        }
    }
}
