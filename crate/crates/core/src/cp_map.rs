//! The completely positive map `Φ(Y) = Σ A_i Y A_i^T`, its adjoint
//! `Φ*(X) = Σ A_i^T X A_i`, two-sided scalings `A_i -> L A_i R^T` and the
//! grad-norm residual
//!
//! ```text
//! err = sqrt(‖Σ A_i A_i^T − I_m/m‖_F² + ‖Σ A_i^T A_i − I_n/n‖_F²)
//! ```
//!
//! A problem is balanced (solved) exactly when `err = 0`.

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SpdMatrix};

/// The tuple `A_1, …, A_k` of `m x n` matrices defining a CP map.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingProblem {
    m: usize,
    n: usize,
    matrices: Vec<DenseMatrix>,
}

impl ScalingProblem {
    /// Validates shapes, finiteness and that both `Φ(I_n)` and `Φ*(I_m)`
    /// are positive definite.
    pub fn new(matrices: Vec<DenseMatrix>) -> Result<Self> {
        let first = matrices.first().ok_or_else(|| {
            Error::DimensionMismatch("a scaling problem needs k >= 1 matrices".into())
        })?;
        let (m, n) = (first.rows(), first.cols());
        for (i, a) in matrices.iter().enumerate() {
            if a.rows() != m || a.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "matrix {i} is {}x{}, expected {m}x{n}",
                    a.rows(),
                    a.cols()
                )));
            }
            if !a.is_finite() {
                return Err(Error::DegenerateProblem(format!(
                    "matrix {i} has non-finite entries"
                )));
            }
        }
        let p = Self { m, n, matrices };
        SpdMatrix::from_symmetrized(p.left_gram()).map_err(|e| {
            Error::DegenerateProblem(format!("Φ(I) is not positive definite ({e})"))
        })?;
        SpdMatrix::from_symmetrized(p.right_gram()).map_err(|e| {
            Error::DegenerateProblem(format!("Φ*(I) is not positive definite ({e})"))
        })?;
        Ok(p)
    }

    /// Skips the well-posedness check; the solvers use this for absorbed
    /// iterates whose next Cholesky factorization performs the check anyway.
    pub(crate) fn from_parts_unchecked(m: usize, n: usize, matrices: Vec<DenseMatrix>) -> Self {
        Self { m, n, matrices }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[DenseMatrix] {
        &self.matrices
    }

    pub fn into_matrices(self) -> Vec<DenseMatrix> {
        self.matrices
    }

    /// `Σ A_i A_i^T = Φ(I_n)`, exactly symmetrized.
    pub fn left_gram(&self) -> DenseMatrix {
        left_gram_of(self.m, &self.matrices)
    }

    /// `Σ A_i^T A_i = Φ*(I_m)`, exactly symmetrized.
    pub fn right_gram(&self) -> DenseMatrix {
        right_gram_of(self.n, &self.matrices)
    }

    /// `Φ(Y)` without the positive-definiteness check.
    pub fn phi_dense(&self, y: &DenseMatrix) -> DenseMatrix {
        let mut acc = DenseMatrix::zeros(self.m, self.m);
        for a in &self.matrices {
            acc = &acc + &(a * y).mul_transpose(a);
        }
        acc.symmetrized()
    }

    /// `Φ*(X)` without the positive-definiteness check.
    pub fn phi_adjoint_dense(&self, x: &DenseMatrix) -> DenseMatrix {
        let mut acc = DenseMatrix::zeros(self.n, self.n);
        for a in &self.matrices {
            acc = &acc + &a.transpose_mul(&(x * a));
        }
        acc.symmetrized()
    }

    pub fn phi(&self, y: &SpdMatrix) -> Result<SpdMatrix> {
        if y.dim() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "Φ expects an {n}x{n} argument, got {d}x{d}",
                n = self.n,
                d = y.dim()
            )));
        }
        SpdMatrix::from_symmetrized(self.phi_dense(y.as_dense()))
    }

    pub fn phi_adjoint(&self, x: &SpdMatrix) -> Result<SpdMatrix> {
        if x.dim() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "Φ* expects an {m}x{m} argument, got {d}x{d}",
                m = self.m,
                d = x.dim()
            )));
        }
        SpdMatrix::from_symmetrized(self.phi_adjoint_dense(x.as_dense()))
    }

    /// The matrices `L A_i R^T` without validation.
    pub fn scaled_matrices(&self, s: &ScalingPair) -> Result<Vec<DenseMatrix>> {
        s.check_dims(self.m, self.n)?;
        Ok(self
            .matrices
            .iter()
            .map(|a| (&s.left * a).mul_transpose(&s.right))
            .collect())
    }

    /// The scaled problem with matrices `L A_i R^T`; `self` is unchanged.
    pub fn apply_scaling(&self, s: &ScalingPair) -> Result<ScalingProblem> {
        ScalingProblem::new(self.scaled_matrices(s)?)
    }

    pub fn grad_norm(&self) -> f64 {
        grad_norm_of(self.m, self.n, &self.matrices)
    }

    /// Grad norm of the implicitly scaled problem `L A_i R^T`.
    pub fn scaled_grad_norm(&self, s: &ScalingPair) -> Result<f64> {
        Ok(grad_norm_of(self.m, self.n, &self.scaled_matrices(s)?))
    }
}

pub(crate) fn left_gram_of(m: usize, matrices: &[DenseMatrix]) -> DenseMatrix {
    let mut acc = DenseMatrix::zeros(m, m);
    for a in matrices {
        acc = &acc + &a.mul_transpose(a);
    }
    acc.symmetrized()
}

pub(crate) fn right_gram_of(n: usize, matrices: &[DenseMatrix]) -> DenseMatrix {
    let mut acc = DenseMatrix::zeros(n, n);
    for a in matrices {
        acc = &acc + &a.transpose_mul(a);
    }
    acc.symmetrized()
}

/// Frobenius distance of a Gram sum from `I/dim`.
fn balance_defect(gram: &DenseMatrix) -> f64 {
    let dim = gram.rows();
    let target = 1.0 / dim as f64;
    let mut sq = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let d = gram.get(i, j) - if i == j { target } else { 0.0 };
            sq += d * d;
        }
    }
    sq
}

pub(crate) fn grad_norm_from_grams(left: &DenseMatrix, right: &DenseMatrix) -> f64 {
    (balance_defect(left) + balance_defect(right)).sqrt()
}

pub(crate) fn grad_norm_of(m: usize, n: usize, matrices: &[DenseMatrix]) -> f64 {
    grad_norm_from_grams(&left_gram_of(m, matrices), &right_gram_of(n, matrices))
}

/// A pair of scaling matrices `(L, R)` acting as `A -> L A R^T`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingPair {
    pub left: DenseMatrix,
    pub right: DenseMatrix,
}

impl ScalingPair {
    pub fn new(left: DenseMatrix, right: DenseMatrix) -> Result<Self> {
        if !left.is_square() || !right.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "scaling factors must be square, got {}x{} and {}x{}",
                left.rows(),
                left.cols(),
                right.rows(),
                right.cols()
            )));
        }
        if !left.is_finite() || !right.is_finite() {
            return Err(Error::InvalidConfig(
                "scaling factors must be finite".into(),
            ));
        }
        Ok(Self { left, right })
    }

    pub fn identity(m: usize, n: usize) -> Self {
        Self {
            left: DenseMatrix::identity(m),
            right: DenseMatrix::identity(n),
        }
    }

    /// The pair applying `self` first and `next` second: `(L₂ L₁, R₂ R₁)`.
    pub fn then(&self, next: &ScalingPair) -> ScalingPair {
        ScalingPair {
            left: &next.left * &self.left,
            right: &next.right * &self.right,
        }
    }

    /// Smallest singular values of `L` and `R`; both positive iff the pair
    /// is invertible.
    pub fn min_singular_values(&self) -> (f64, f64) {
        let last = |m: &DenseMatrix| *m.singular_values().last().expect("nonempty");
        (last(&self.left), last(&self.right))
    }

    pub fn is_invertible(&self) -> bool {
        let (l, r) = self.min_singular_values();
        self.left.is_finite() && self.right.is_finite() && l > 0.0 && r > 0.0
    }

    fn check_dims(&self, m: usize, n: usize) -> Result<()> {
        if self.left.rows() != m || self.right.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "scaling pair is ({}x{}, {}x{}) but the problem is {m}x{n}",
                self.left.rows(),
                self.left.cols(),
                self.right.rows(),
                self.right.cols()
            )));
        }
        Ok(())
    }
}

/// Solution of a frame scaling problem: `{α_i P x_i}` is a tight frame
/// with equal norms.
#[derive(Clone, Debug)]
pub struct FrameScaling {
    pub p: DenseMatrix,
    pub alpha: Vec<f64>,
}

/// Relative off-diagonal magnitude of `R` tolerated by [`frame_recover`].
pub const FRAME_DIAGONAL_TOLERANCE: f64 = 1e-8;

/// Converts an operator-scaling solution `(L, R)` for `A_i = x_i e_i^T`
/// into frame scaling data, `P = √n L` and `α_i = ((R^T R)_ii)^{1/2}`.
pub fn frame_recover(l: &DenseMatrix, r: &DenseMatrix) -> Result<FrameScaling> {
    if !l.is_square() || !r.is_square() {
        return Err(Error::DimensionMismatch(
            "frame recovery needs square factors".into(),
        ));
    }
    let tolerance = FRAME_DIAGONAL_TOLERANCE * r.max_abs();
    let offdiag = r.max_abs_offdiag();
    if offdiag > tolerance {
        return Err(Error::NotDiagonal { offdiag, tolerance });
    }
    let n = l.rows() as f64;
    let alpha = r
        .transpose_mul(r)
        .diagonal()
        .into_iter()
        .map(f64::sqrt)
        .collect();
    Ok(FrameScaling {
        p: l.scale(n.sqrt()),
        alpha,
    })
}

/// Residual of the two frame conditions
///
/// ```text
/// Σ α_i² (P x_i)(P x_i)^T = I_n,    α_i² ‖P x_i‖² = n/k,
/// ```
///
/// each measured relative to the norm of its target (`‖I_n‖_F = √n` and
/// `‖(n/k, …, n/k)‖₂ = n/√k`) and combined in root-sum-square.
pub fn frame_residual(frame: &FrameScaling, vectors: &[Vec<f64>]) -> Result<f64> {
    let n = frame.p.rows();
    let k = vectors.len();
    if frame.alpha.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {k} vectors",
            frame.alpha.len()
        )));
    }
    let mut tight = DenseMatrix::scaled_identity(n, -1.0);
    let mut norm_sq = 0.0;
    let target = n as f64 / k as f64;
    for (x, &a) in vectors.iter().zip(&frame.alpha) {
        let col = DenseMatrix::from_row_major(x.len(), 1, x.clone())?;
        let px = (&frame.p * &col).scale(a);
        tight = &tight + &px.mul_transpose(&px);
        let d = px.frobenius_norm().powi(2) - target;
        norm_sq += d * d;
    }
    let tight_rel = tight.frobenius_norm() / (n as f64).sqrt();
    let norm_rel = norm_sq.sqrt() / (target * (k as f64).sqrt());
    Ok(tight_rel.hypot(norm_rel))
}
