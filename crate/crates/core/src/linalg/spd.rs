//! Symmetric positive definite matrices, spectral functions and the
//! Hilbert-metric geodesic.
//!
//! Every SPD-producing operation finishes with the exact symmetrization
//! `(S + S^T) / 2`. Nonpositive eigenvalues are reported as errors and
//! never clamped.

use nalgebra::linalg::SymmetricEigen;

use crate::error::{Error, Result};

use super::triangular::{cholesky_factor, LowerTriangular};
use super::DenseMatrix;

/// Absolute per-entry asymmetry accepted by [`SpdMatrix::new`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Eigenvalues at or below this multiple of the largest one are treated as
/// nonpositive by [`spd_power`].
pub const EIGEN_FLOOR: f64 = f64::EPSILON;

/// Symmetric positive definite matrix together with its Cholesky factor.
#[derive(Clone, Debug, PartialEq)]
pub struct SpdMatrix {
    mat: DenseMatrix,
    chol: LowerTriangular,
}

impl SpdMatrix {
    /// Checks symmetry to [`SYMMETRY_TOLERANCE`], symmetrizes exactly and
    /// verifies positive definiteness through Cholesky.
    pub fn new(m: DenseMatrix) -> Result<Self> {
        check_square(&m)?;
        let n = m.rows();
        for i in 0..n {
            for j in (i + 1)..n {
                let deviation = (m.get(i, j) - m.get(j, i)).abs();
                if !(deviation <= SYMMETRY_TOLERANCE) {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        deviation,
                    });
                }
            }
        }
        Self::from_symmetrized(m)
    }

    /// Symmetrizes `m` without a tolerance check, then verifies positive
    /// definiteness. Used for matrices that are symmetric in exact arithmetic.
    pub fn from_symmetrized(m: DenseMatrix) -> Result<Self> {
        check_square(&m)?;
        let mat = m.symmetrized();
        let chol = cholesky_factor(&mat)?;
        Ok(Self { mat, chol })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mat: DenseMatrix::identity(n),
            chol: LowerTriangular::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn as_dense(&self) -> &DenseMatrix {
        &self.mat
    }

    pub fn into_dense(self) -> DenseMatrix {
        self.mat
    }

    /// Lower Cholesky factor computed at construction.
    pub fn cholesky(&self) -> &LowerTriangular {
        &self.chol
    }

    pub fn scale(&self, c: f64) -> Result<SpdMatrix> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::NotPositiveDefinite(format!(
                "scaling an SPD matrix by {c}"
            )));
        }
        SpdMatrix::from_symmetrized(self.mat.scale(c))
    }

    /// Inverse through the spectral decomposition.
    pub fn inverse(&self) -> Result<SpdMatrix> {
        spd_power(self, -1.0)
    }
}

fn check_square(m: &DenseMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )))
    }
}

/// Spectral decomposition `S = V diag(values) V^T` with descending values.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl SymEigen {
    /// `V diag(f(values)) V^T`, exactly symmetrized.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let n = self.values.len();
        let v = self.vectors.as_matrix();
        let mut scaled = v.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let fj = f(lambda);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        DenseMatrix::from(scaled * v.transpose()).symmetrized()
    }
}

/// Symmetric eigendecomposition, eigenvalues sorted in descending order.
pub fn sym_eigen(s: &DenseMatrix) -> Result<SymEigen> {
    check_square(s)?;
    let n = s.rows();
    let budget = 100 * n.max(10);
    let eig = SymmetricEigen::try_new(s.as_matrix().clone(), f64::EPSILON, budget)
        .ok_or(Error::NoConvergence { iterations: budget })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SymEigen { values, vectors })
}

/// Spectral decomposition of an SPD matrix with the positivity check applied.
fn positive_eigen(s: &SpdMatrix) -> Result<SymEigen> {
    let eig = sym_eigen(s.as_dense())?;
    let max = eig.values[0];
    let min = *eig.values.last().expect("nonempty spectrum");
    if !(max > 0.0 && min > EIGEN_FLOOR * max && min.is_finite() && max.is_finite()) {
        return Err(Error::NotPositiveDefinite(format!(
            "eigenvalue range [{min:e}, {max:e}] is not safely positive"
        )));
    }
    Ok(eig)
}

/// Real matrix power `S^w = V diag(lambda^w) V^T`.
pub fn spd_power(s: &SpdMatrix, w: f64) -> Result<SpdMatrix> {
    if !w.is_finite() {
        return Err(Error::InvalidConfig(format!("matrix power exponent {w}")));
    }
    let eig = positive_eigen(s)?;
    SpdMatrix::from_symmetrized(eig.map(|l| l.powf(w)))
}

/// Point at parameter `w` on the geodesic from `x` to `xt`:
/// `X^{1/2} (X^{-1/2} Xt X^{-1/2})^w X^{1/2}`. Defined for every real `w`.
pub fn geodesic_sharp(x: &SpdMatrix, xt: &SpdMatrix, w: f64) -> Result<SpdMatrix> {
    if x.dim() != xt.dim() {
        return Err(Error::DimensionMismatch(format!(
            "geodesic endpoints have dimensions {} and {}",
            x.dim(),
            xt.dim()
        )));
    }
    let eig = positive_eigen(x)?;
    let half = eig.map(f64::sqrt);
    let inv_half = eig.map(|l| 1.0 / l.sqrt());
    let inner = SpdMatrix::from_symmetrized(&(&inv_half * xt.as_dense()) * &inv_half)?;
    let powered = spd_power(&inner, w)?;
    SpdMatrix::from_symmetrized(&(&half * powered.as_dense()) * &half)
}
