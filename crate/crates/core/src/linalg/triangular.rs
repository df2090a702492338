//! Lower-triangular factors: Cholesky factorization and triangular inversion.

use crate::error::{Error, Result};

use super::spd::SpdMatrix;
use super::DenseMatrix;

/// Lower-triangular matrix with strictly positive diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerTriangular(DenseMatrix);

impl LowerTriangular {
    /// Validates that `m` is square, exactly zero above the diagonal and has a
    /// positive diagonal.
    pub fn new(m: DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "triangular factor must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows();
        for i in 0..n {
            let d = m.get(i, i);
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::Singular { index: i, value: d });
            }
            for j in (i + 1)..n {
                if m.get(i, j) != 0.0 {
                    return Err(Error::DimensionMismatch(format!(
                        "entry ({i}, {j}) above the diagonal is nonzero"
                    )));
                }
            }
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(DenseMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_dense(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_dense(self) -> DenseMatrix {
        self.0
    }

    pub fn inverse(&self) -> Result<LowerTriangular> {
        tri_solve_inverse(self)
    }
}

/// Cholesky factor of an SPD matrix. The factor is computed when the
/// [`SpdMatrix`] is constructed, so this is a copy.
pub fn cholesky_lower(s: &SpdMatrix) -> LowerTriangular {
    s.cholesky().clone()
}

/// Lower Cholesky factor `L` with `L L^T = s` and positive diagonal.
///
/// Only the lower triangle of `s` is read. Fails with
/// [`Error::NotPositiveDefinite`] on the first pivot that is not strictly
/// positive and finite.
pub fn cholesky_factor(s: &DenseMatrix) -> Result<LowerTriangular> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "Cholesky needs a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    let n = s.rows();
    let mut l = vec![0.0_f64; n * n];
    for j in 0..n {
        let row_j = &l[j * n..j * n + j];
        let pivot = s.get(j, j) - row_j.iter().map(|v| v * v).sum::<f64>();
        if !(pivot.is_finite() && pivot > 0.0) {
            return Err(Error::NotPositiveDefinite(format!(
                "Cholesky pivot {j} of {n} is {pivot:e}"
            )));
        }
        let d = pivot.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let dot: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            l[i * n + j] = (s.get(i, j) - dot) / d;
        }
    }
    Ok(LowerTriangular(DenseMatrix::from_fn(n, n, |i, j| {
        l[i * n + j]
    })))
}

/// Inverse of a lower-triangular matrix by forward substitution, column by
/// column.
pub fn tri_solve_inverse(l: &LowerTriangular) -> Result<LowerTriangular> {
    let n = l.dim();
    let a = l.as_dense();
    for i in 0..n {
        let d = a.get(i, i);
        if !(d.is_finite() && d != 0.0) {
            return Err(Error::Singular { index: i, value: d });
        }
    }
    let mut x = vec![0.0_f64; n * n];
    for j in 0..n {
        x[j * n + j] = 1.0 / a.get(j, j);
        for i in (j + 1)..n {
            let acc: f64 = (j..i).map(|k| a.get(i, k) * x[k * n + j]).sum();
            x[i * n + j] = -acc / a.get(i, i);
        }
    }
    Ok(LowerTriangular(DenseMatrix::from_fn(n, n, |i, j| {
        x[i * n + j]
    })))
}
