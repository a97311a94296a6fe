//! Dense complex linear algebra for small systems.
//!
//! Everything here is deterministic: decompositions are canonicalized so the
//! same input produces the same vectors on every platform. Eigenvectors and
//! singular vectors have their first component of largest modulus made real
//! and positive, and vectors inside a degenerate cluster (gap below
//! [`DEGENERACY_GAP`]) are replaced by the Gram-Schmidt orthonormalization of
//! the projected standard basis, taken in index order.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;
use thiserror::Error;

use crate::TOLERANCE;

/// Largest side of a single subsystem factor.
pub const MAX_FACTOR_DIM: usize = 64;

/// Largest side of any matrix handled by the kernel (two maximal factors).
pub const MAX_SIDE: usize = MAX_FACTOR_DIM * MAX_FACTOR_DIM;

/// Eigenvalues (or singular values) closer than this are treated as one
/// degenerate cluster when canonicalizing bases.
pub const DEGENERACY_GAP: f64 = 1e-8;

const MAX_JACOBI_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension {side} exceeds the supported maximum {max}")]
    TooLarge { side: usize, max: usize },
    #[error("matrix dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("entry count {found} does not match shape {rows}x{cols}")]
    BadShape {
        rows: usize,
        cols: usize,
        found: usize,
    },
    #[error("matrices must have at least one row and one column")]
    Empty,
}

/// Which factor of a bipartite product space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    First,
    Second,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::First => Subsystem::Second,
            Subsystem::Second => Subsystem::First,
        }
    }

    /// Side of this factor in a `(d1, d2)` split.
    pub fn dim(self, dims: (usize, usize)) -> usize {
        match self {
            Subsystem::First => dims.0,
            Subsystem::Second => dims.1,
        }
    }
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::Empty);
        }
        if rows > MAX_SIDE || cols > MAX_SIDE {
            return Err(LinalgError::TooLarge {
                side: rows.max(cols),
                max: MAX_SIDE,
            });
        }
        if data.len() != rows * cols {
            return Err(LinalgError::BadShape {
                rows,
                cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self {
            rows,
            cols,
            data: vec![Complex64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j])
    }

    /// Builds a real-valued matrix from nested rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| c(rows[i][j]))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = c(d);
        }
        m
    }

    /// Assembles a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Self {
        let rows = columns[0].len();
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// `|u⟩⟨u|`.
    pub fn projector(u: &[Complex64]) -> Self {
        Self::outer(u, u)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Complex64]) {
        for (i, &z) in v.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(c(k))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance to another matrix of the same shape.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖m − m†‖_F`, or an error for non-square input.
    pub fn hermiticity_error(&self) -> Result<f64, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error().map(|e| e <= tol).unwrap_or(false)
    }

    /// `(m + m†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// `‖u†u − I‖_F`.
    pub fn unitarity_error(&self) -> Result<f64, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        Ok((&self.adjoint() * self).distance(&Self::identity(self.rows)))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error().map(|e| e <= tol).unwrap_or(false)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: (self.cols, other.cols),
                found: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        assert_eq!(self.rows, other.cols, "shape mismatch");
        let mut acc = Complex64::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// `⟨a, b⟩ = Tr(a† b)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `[a, b] = ab − ba`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Conjugates by a unitary: `u† self u`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(&u.adjoint() * self) * u
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on incompatible shapes; use [`ComplexMatrix::checked_mul`] for
    /// untrusted input.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_mul(rhs).expect("incompatible matrix shapes")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Sums a non-empty list of equally shaped matrices.
pub fn sum_matrices<'a>(mut it: impl Iterator<Item = &'a ComplexMatrix>) -> Option<ComplexMatrix> {
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, m| &acc + m))
}

/// Kronecker product with block layout `a[i,j]·b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    if rows > MAX_SIDE || cols > MAX_SIDE {
        return Err(LinalgError::TooLarge {
            side: rows.max(cols),
            max: MAX_SIDE,
        });
    }
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let s = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = s * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of two vectors, `|a⟩⊗|b⟩`.
pub fn tensor_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

pub(crate) fn check_factor_dims(dims: (usize, usize)) -> Result<(), LinalgError> {
    for d in [dims.0, dims.1] {
        if d == 0 {
            return Err(LinalgError::Empty);
        }
        if d > MAX_FACTOR_DIM {
            return Err(LinalgError::TooLarge {
                side: d,
                max: MAX_FACTOR_DIM,
            });
        }
    }
    Ok(())
}

/// Traces out the factor not listed in `keep` from an operator on a
/// `dims.0 × dims.1` product space (first factor is the major index).
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<ComplexMatrix, LinalgError> {
    check_factor_dims(dims)?;
    let side = dims.0 * dims.1;
    if m.shape() != (side, side) {
        return Err(LinalgError::DimensionMismatch {
            expected: (side, side),
            found: m.shape(),
        });
    }
    let (d1, d2) = dims;
    let out = match keep {
        Subsystem::First => ComplexMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()
        }),
        Subsystem::Second => ComplexMatrix::from_fn(d2, d2, |i, j| {
            (0..d1).map(|k| m[(k * d2 + i, k * d2 + j)]).sum()
        }),
    };
    Ok(out)
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianDecomposition {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianDecomposition {
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    /// `V diag(e) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let d = ComplexMatrix::from_real_diagonal(&self.eigenvalues);
        &(v * &d) * &v.adjoint()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Applies a real function to the spectrum: `V f(diag(e)) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        let d = ComplexMatrix::from_real_diagonal(&vals);
        &(v * &d) * &v.adjoint()
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Inputs within [`TOLERANCE`] of Hermitian are symmetrized first; anything
/// further off is rejected.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianDecomposition, LinalgError> {
    let herr = m.hermiticity_error()?;
    let scale = m.frobenius_norm().max(1.0);
    if herr > TOLERANCE * scale {
        return Err(LinalgError::NotHermitian(herr));
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let norm = a.frobenius_norm();
    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-2 * norm || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> =
        (0..n).map(|k| (a[(k, k)].re, v.column(k))).collect();
    // Stable sort keeps index order inside exact ties.
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(core::cmp::Ordering::Equal));
    let mut eigenvalues: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut vectors: Vec<Vec<Complex64>> = pairs.into_iter().map(|p| p.1).collect();

    for (start, end) in clusters(&eigenvalues) {
        if end - start > 1 {
            canonicalize_cluster(&mut vectors[start..end]);
            // Rayleigh quotients of the canonical vectors.
            let sym = m.hermitian_part();
            for k in start..end {
                let mv = sym.mul_vec(&vectors[k]);
                eigenvalues[k] = dot(&vectors[k], &mv).re;
            }
        }
    }
    for vec in vectors.iter_mut() {
        fix_phase(vec);
    }
    Ok(HermitianDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_columns(&vectors),
    })
}

fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / r; // e^{iφ}
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;
    // Rotation R = diag(1, e^{-iφ}) · [[c, s], [-s, c]] on the (p, q) plane.
    let rpp = c(cs);
    let rpq = c(sn);
    let rqp = phase.conj() * (-sn);
    let rqq = phase.conj() * cs;
    let n = a.rows;
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * rpp + aiq * rqp;
        a[(i, q)] = aip * rpq + aiq * rqq;
    }
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = rpp.conj() * apj + rqp.conj() * aqj;
        a[(q, j)] = rpq.conj() * apj + rqq.conj() * aqj;
    }
    a[(p, q)] = Complex64::zero();
    a[(q, p)] = Complex64::zero();
    a[(p, p)] = c(a[(p, p)].re);
    a[(q, q)] = c(a[(q, q)].re);
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * rpp + viq * rqp;
        v[(i, q)] = vip * rpq + viq * rqq;
    }
}

/// Maximal runs of sorted values whose consecutive gaps stay below
/// [`DEGENERACY_GAP`], as half-open index ranges.
fn clusters(sorted_desc: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=sorted_desc.len() {
        if k == sorted_desc.len() || (sorted_desc[k - 1] - sorted_desc[k]).abs() >= DEGENERACY_GAP {
            out.push((start, k));
            start = k;
        }
    }
    out
}

pub(crate) fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub(crate) fn norm(u: &[Complex64]) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Makes the first component of (near-)largest modulus real and positive.
/// Returns the unit phase the vector was multiplied by.
pub(crate) fn fix_phase(v: &mut [Complex64]) -> Complex64 {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return c(1.0);
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-12))
        .expect("pivot exists");
    let rot = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= rot;
    }
    v[pivot] = c(v[pivot].re);
    rot
}

/// Replaces an orthonormal set by the Gram-Schmidt orthonormalization of the
/// standard basis projected onto its span, in index order.
///
/// Returns the `k×k` change of basis `Q` with `new = old · Q`.
fn canonicalize_cluster(vectors: &mut [Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let k = vectors.len();
    let n = vectors[0].len();
    let old: Vec<Vec<Complex64>> = vectors.to_vec();
    let project = |i: usize| -> Vec<Complex64> {
        // P e_i = Σ_j v_j conj(v_j[i])
        let mut out = vec![Complex64::zero(); n];
        for vj in &old {
            let coef = vj[i].conj();
            for (o, x) in out.iter_mut().zip(vj) {
                *o += x * coef;
            }
        }
        out
    };
    let mut accepted: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    let residual = |mut w: Vec<Complex64>, acc: &[Vec<Complex64>]| {
        for _ in 0..2 {
            for a in acc {
                let proj = dot(a, &w);
                for (x, y) in w.iter_mut().zip(a) {
                    *x -= y * proj;
                }
            }
        }
        let nrm = norm(&w);
        (w, nrm)
    };
    for i in 0..n {
        if accepted.len() == k {
            break;
        }
        let (w, nrm) = residual(project(i), &accepted);
        if nrm > 1e-3 {
            accepted.push(w.into_iter().map(|x| x / nrm).collect());
        }
    }
    while accepted.len() < k {
        // Fall back to the largest remaining residual.
        let (w, nrm) = (0..n)
            .map(|i| residual(project(i), &accepted))
            .fold((Vec::new(), -1.0), |best, cand| if cand.1 > best.1 { cand } else { best });
        accepted.push(w.into_iter().map(|x| x / nrm).collect());
    }
    // Q[j][l] = ⟨old_j | new_l⟩
    let q: Vec<Vec<Complex64>> = old
        .iter()
        .map(|o| accepted.iter().map(|a| dot(o, a)).collect())
        .collect();
    vectors.clone_from_slice(&accepted);
    q
}

/// Thin singular value decomposition `m = U diag(s) V†`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows × k` with orthonormal columns, `k = min(rows, cols)`.
    pub u: ComplexMatrix,
    /// Descending, nonnegative.
    pub singular_values: Vec<f64>,
    /// `cols × k` with orthonormal columns.
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let s = ComplexMatrix::from_real_diagonal(&self.singular_values);
        &(&self.u * &s) * &self.v.adjoint()
    }

    /// Number of singular values above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }
}

/// Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
pub fn svd(m: &ComplexMatrix) -> Result<Svd, LinalgError> {
    if m.rows > MAX_SIDE || m.cols > MAX_SIDE {
        return Err(LinalgError::TooLarge {
            side: m.rows.max(m.cols),
            max: MAX_SIDE,
        });
    }
    let (mut u_cols, s, mut v_cols) = if m.rows >= m.cols {
        one_sided_jacobi(m)
    } else {
        let (u, s, v) = one_sided_jacobi(&m.adjoint());
        (v, s, u)
    };

    for (start, end) in clusters(&s) {
        if end - start > 1 {
            let q = canonicalize_cluster(&mut v_cols[start..end]);
            // U' = U Q keeps U Σ V† unchanged inside the cluster.
            let old_u: Vec<Vec<Complex64>> = u_cols[start..end].to_vec();
            for l in 0..end - start {
                let mut col = vec![Complex64::zero(); m.rows];
                for (j, uj) in old_u.iter().enumerate() {
                    for (x, y) in col.iter_mut().zip(uj) {
                        *x += y * q[j][l];
                    }
                }
                u_cols[start + l] = col;
            }
        }
    }
    for (uj, vj) in u_cols.iter_mut().zip(v_cols.iter_mut()) {
        let rot = fix_phase(vj);
        for z in uj.iter_mut() {
            *z *= rot;
        }
    }
    Ok(Svd {
        u: ComplexMatrix::from_columns(&u_cols),
        singular_values: s,
        v: ComplexMatrix::from_columns(&v_cols),
    })
}

type Columns = Vec<Vec<Complex64>>;

/// Requires `rows >= cols`. Returns sorted `(U columns, s, V columns)`.
fn one_sided_jacobi(m: &ComplexMatrix) -> (Columns, Vec<f64>, Columns) {
    let (rows, n) = m.shape();
    let mut w: Columns = (0..n).map(|j| m.column(j)).collect();
    let mut v: Columns = (0..n)
        .map(|j| {
            let mut e = vec![Complex64::zero(); n];
            e[j] = c(1.0);
            e
        })
        .collect();

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = dot(&w[p], &w[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for cols in [&mut w, &mut v] {
                    let (lo, hi) = cols.split_at_mut(q);
                    let xp = &mut lo[p];
                    let xq = &mut hi[0];
                    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
                        let bt = *b * phase.conj();
                        let na = *a * cs - bt * sn;
                        let nb = *a * sn + bt * cs;
                        *a = na;
                        *b = nb;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(f64, usize)> = w.iter().enumerate().map(|(j, col)| (norm(col), j)).collect();
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(core::cmp::Ordering::Equal));
    let smax = order.first().map(|o| o.0).unwrap_or(0.0);
    let cutoff = smax * (rows.max(n) as f64) * f64::EPSILON;

    let mut s = Vec::with_capacity(n);
    let mut u_cols: Columns = Vec::with_capacity(n);
    let mut v_sorted: Columns = Vec::with_capacity(n);
    let mut pending = Vec::new();
    for &(sigma, j) in &order {
        v_sorted.push(v[j].clone());
        s.push(sigma);
        if sigma > cutoff && sigma > 0.0 {
            u_cols.push(w[j].iter().map(|z| z / sigma).collect());
        } else {
            pending.push(u_cols.len());
            u_cols.push(Vec::new());
        }
    }
    // Complete U for (numerically) zero singular values.
    for slot in pending {
        let filled: Columns = u_cols.iter().filter(|c| !c.is_empty()).cloned().collect();
        let mut best: (Vec<Complex64>, f64) = (Vec::new(), -1.0);
        for i in 0..rows {
            let mut e = vec![Complex64::zero(); rows];
            e[i] = c(1.0);
            for _ in 0..2 {
                for f in &filled {
                    let proj = dot(f, &e);
                    for (x, y) in e.iter_mut().zip(f) {
                        *x -= y * proj;
                    }
                }
            }
            let nrm = norm(&e);
            if nrm > 1e-3 {
                best = (e, nrm);
                break;
            }
            if nrm > best.1 {
                best = (e, nrm);
            }
        }
        u_cols[slot] = best.0.iter().map(|z| z / best.1).collect();
    }
    (u_cols, s, v_sorted)
}

/// Pauli matrices and other fixed operators used across the crate.
pub mod pauli {
    use super::*;

    pub fn identity2() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            &[Complex64::zero(), Complex64::new(0.0, -1.0)],
            &[Complex64::new(0.0, 1.0), Complex64::zero()],
        ])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    /// `n·σ` for a (not necessarily unit) real 3-vector.
    pub fn dot_sigma(n: [f64; 3]) -> ComplexMatrix {
        &(&x().scale_real(n[0]) + &y().scale_real(n[1])) + &z().scale_real(n[2])
    }
}
