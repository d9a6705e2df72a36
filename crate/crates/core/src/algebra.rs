//! Dense complex matrices, Kronecker products and the row-major lifting
//! between operators on `H` and vectors on `H ⊗ H`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix with finite entries.
///
/// Arithmetic operators follow `ndarray` and panic on shape mismatch; the
/// fallible entry points that take user data return [`Error`] instead.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    data: Array2<C64>,
}

impl ComplexMatrix {
    /// Wraps an array, rejecting empty shapes and non-finite entries.
    pub fn from_array(data: Array2<C64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::InvalidArgument("matrix must be non-empty".into()));
        }
        if let Some(bad) = data.iter().find(|z| !z.is_finite()) {
            return Err(Error::NumericalRange(format!("non-finite matrix entry {bad}")));
        }
        Ok(Self { data })
    }

    // Arithmetic on finite matrices can still overflow; callers that need
    // the finiteness guarantee re-validate through `from_array`.
    pub(crate) fn from_array_unchecked(data: Array2<C64>) -> Self {
        Self { data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
            return Err(Error::mismatch(format!("row {i}"), ncols, r.len()));
        }
        let flat: Vec<C64> = rows.iter().flatten().copied().collect();
        let data = Array2::from_shape_vec((nrows, ncols), flat)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Self::from_array(data)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut((usize, usize)) -> C64) -> Self {
        Self::from_array_unchecked(Array2::from_shape_fn((rows, cols), f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_array_unchecked(Array2::zeros((rows, cols)))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_array_unchecked(Array2::eye(n))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        Self::from_array_unchecked(Array2::from_diag(&Array1::from(entries.to_vec())))
    }

    pub fn real_diagonal(entries: &[f64]) -> Self {
        let v: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diagonal(&v)
    }

    /// `|i⟩⟨j|` in dimension `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Array2::zeros((n, n));
        m[(i, j)] = ONE;
        Self::from_array_unchecked(m)
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |(i, j)| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Side length of a square matrix, or [`Error::NotSquare`].
    pub fn square_dim(&self, context: &'static str) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows())
        } else {
            Err(Error::NotSquare {
                context,
                rows: self.rows(),
                cols: self.cols(),
            })
        }
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    pub fn as_array(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<C64> {
        self.data
    }

    pub fn map(&self, f: impl FnMut(&C64) -> C64) -> Self {
        Self::from_array_unchecked(self.data.map(f))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_array_unchecked(&self.data * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn dot(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        Self::from_array_unchecked(self.data.dot(&rhs.data))
    }

    pub fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        self.data.dot(v)
    }

    pub fn transpose(&self) -> Self {
        Self::from_array_unchecked(self.data.t().to_owned())
    }

    /// Entrywise complex conjugate. For an operator `M` this is the ancilla
    /// copy with `⟨m|M_A|n⟩ = ⟨n|M†|m⟩`.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_array_unchecked(self.data.t().map(|z| z.conj()))
    }

    pub fn trace(&self) -> C64 {
        self.data.diag().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        self.data
            .axis_iter(Axis(1))
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.data
            .axis_iter(Axis(0))
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Upper bound on the spectral norm, `sqrt(‖A‖₁ ‖A‖∞)`.
    pub fn spectral_norm_bound(&self) -> f64 {
        (self.norm_one() * self.norm_inf()).sqrt()
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.data.dim(), other.data.dim(), "shape mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖A − A†‖_F`.
    pub fn hermiticity_deviation(&self) -> f64 {
        (self - &self.adjoint()).frobenius_norm()
    }

    pub fn commutator(&self, other: &ComplexMatrix) -> ComplexMatrix {
        &self.dot(other) - &other.dot(self)
    }

    /// Eigenvalues of the Hermitian part `(A + A†)/2`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.square_dim("hermitian_eigenvalues")?;
        let herm = (self + &self.adjoint()).scale_real(0.5);
        let m = DMatrix::from_fn(n, n, |i, j| herm.get(i, j));
        let mut values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalRange("eigenvalue solver diverged".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.hermitian_eigenvalues()?[0])
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows(), self.cols(), |i, j| self.data[(i, j)])
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |(i, j)| m[(i, j)])
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{:?}", self.data)
    }
}

macro_rules! elementwise_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix::from_array_unchecked(&self.data $op &rhs.data)
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix::from_array_unchecked(self.data $op rhs.data)
            }
        }
    };
}

elementwise_op!(Add, add, +);
elementwise_op!(Sub, sub, -);

impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.dot(rhs)
    }
}

impl Mul<&ComplexMatrix> for C64 {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        rhs.scale(self)
    }
}

impl Mul<&ComplexMatrix> for f64 {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        rhs.scale_real(self)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

// Literal format: nested rows of [re, im] pairs.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .data
            .outer_iter()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let rows: Vec<Vec<C64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(de::Error::custom)
    }
}

/// Kronecker product with the left factor's index major.
///
/// Entry `(i·rB + k, j·cB + l)` of the result is `A(i,j)·B(k,l)`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = Array2::zeros((a.rows() * rb, a.cols() * cb));
    for ((i, j), &aij) in a.data.indexed_iter() {
        if aij == ZERO {
            continue;
        }
        out.slice_mut(ndarray::s![i * rb..(i + 1) * rb, j * cb..(j + 1) * cb])
            .zip_mut_with(&b.data, |o, &bkl| *o = aij * bkl);
    }
    ComplexMatrix::from_array_unchecked(out)
}

/// Entrywise complex conjugate of a square operator.
pub fn entrywise_conjugate(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.square_dim("entrywise_conjugate")?;
    Ok(m.conj())
}

/// Permutation exchanging the two factors of `C^n ⊗ C^n`.
pub fn swap_permutation(n: usize) -> ComplexMatrix {
    let mut s = Array2::zeros((n * n, n * n));
    for a in 0..n {
        for b in 0..n {
            s[(b * n + a, a * n + b)] = ONE;
        }
    }
    ComplexMatrix::from_array_unchecked(s)
}

/// An operator `ρ` on an `N`-level system written as a vector on the
/// doubled space; slot `m·N + n` holds `ρ_mn`.
///
/// The vector is not normalized in general: its squared norm is `Tr(ρ†ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedState {
    dim: usize,
    amplitudes: Array1<C64>,
}

impl LiftedState {
    pub fn from_amplitudes(amplitudes: Array1<C64>) -> Result<Self> {
        let len = amplitudes.len();
        let dim = (len as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != len {
            return Err(Error::NotPerfectSquare(len));
        }
        Ok(Self { dim, amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Applies a lifted-space operator (e.g. a propagator) to the state.
    pub fn evolve(&self, op: &ComplexMatrix) -> Result<LiftedState> {
        let n2 = self.dim * self.dim;
        if op.rows() != n2 || op.cols() != n2 {
            return Err(Error::mismatch(
                "lifted operator",
                format!("{n2}x{n2}"),
                format!("{}x{}", op.rows(), op.cols()),
            ));
        }
        Ok(Self {
            dim: self.dim,
            amplitudes: op.apply(&self.amplitudes),
        })
    }
}

pub fn vectorize(rho: &ComplexMatrix) -> Result<LiftedState> {
    let dim = rho.square_dim("vectorize")?;
    let amplitudes = Array1::from_iter(rho.as_array().iter().copied());
    Ok(LiftedState { dim, amplitudes })
}

pub fn devectorize(psi: &LiftedState) -> ComplexMatrix {
    let n = psi.dim;
    let data = Array2::from_shape_vec((n, n), psi.amplitudes.to_vec())
        .expect("lifted state holds dim² amplitudes");
    ComplexMatrix::from_array_unchecked(data)
}

/// Partial trace over the second factor of `C^sys ⊗ C^env`.
pub fn partial_trace_env(joint: &ComplexMatrix, sys: usize, env: usize) -> Result<ComplexMatrix> {
    let n = joint.square_dim("partial_trace_env")?;
    if sys * env != n || sys == 0 {
        return Err(Error::mismatch("partial trace", n, format!("{sys}*{env}")));
    }
    let j = joint.as_array();
    Ok(ComplexMatrix::from_fn(sys, sys, |(a, b)| {
        (0..env).map(|e| j[(a * env + e, b * env + e)]).sum()
    }))
}
