//! Dense real linear algebra used by the scaling solvers.
//!
//! [`DenseMatrix`] is a thin wrapper over a column-major `nalgebra` matrix
//! that exposes a row-major construction interface. The SPD-specific
//! machinery (Cholesky factors, fractional powers and the geodesic
//! `X #_w Y`) lives in [`triangular`] and [`spd`].

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub mod spd;
pub mod triangular;

pub use spd::{geodesic_sharp, spd_power, sym_eigen, SpdMatrix, SymEigen};
pub use triangular::{cholesky_factor, cholesky_lower, tri_solve_inverse, LowerTriangular};

/// Real `rows x cols` matrix of `f64`.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix(DMatrix<f64>);

impl DenseMatrix {
    /// Builds a matrix from row-major data, rejecting wrong lengths and
    /// non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &data)))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> f64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    /// Like [`DenseMatrix::from_fn`] but guarantees `f` is called in row-major
    /// order, for stateful generators.
    pub fn from_fn_row_major(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self(DMatrix::from_row_slice(rows, cols, &data))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        Self(DMatrix::from_diagonal_element(n, n, c))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.0[(i, j)] = v;
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows().min(self.cols()))
            .map(|i| self.0[(i, i)])
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(&self.0 * c)
    }

    /// `self * other^T` without materializing the transpose.
    pub fn mul_transpose(&self, other: &DenseMatrix) -> Self {
        Self(&self.0 * other.0.transpose())
    }

    /// `self^T * other` without materializing the transpose.
    pub fn transpose_mul(&self, other: &DenseMatrix) -> Self {
        Self(self.0.tr_mul(&other.0))
    }

    /// `(S + S^T) / 2`.
    pub fn symmetrized(&self) -> Self {
        Self((&self.0 + self.0.transpose()) * 0.5)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Frobenius inner product `tr(A^T B)`.
    pub fn frobenius_inner(&self, other: &DenseMatrix) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    /// Largest absolute entry off the main diagonal.
    pub fn max_abs_offdiag(&self) -> f64 {
        let mut best = 0.0_f64;
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                if i != j {
                    best = best.max(self.0[(i, j)].abs());
                }
            }
        }
        best
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.0.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Ratio of the extreme singular values (infinite when rank deficient).
    pub fn condition_number(&self) -> f64 {
        let sv = self.singular_values();
        match (sv.first(), sv.last()) {
            (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
            _ => f64::INFINITY,
        }
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

impl From<DMatrix<f64>> for DenseMatrix {
    fn from(m: DMatrix<f64>) -> Self {
        Self(m)
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "DenseMatrix {}x{} {:?}",
            self.rows(),
            self.cols(),
            self.to_row_major()
        )
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;

    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        DenseMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;

    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        DenseMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;

    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        DenseMatrix(&self.0 - &rhs.0)
    }
}

/// The `n x n` Hilbert matrix, `H[i][j] = 1 / (i + j + 1)` with 0-based indices.
pub fn hilbert(n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| 1.0 / (i + j + 1) as f64)
}
