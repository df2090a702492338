//! Seeded generators for the experiment families and the problem file format.
//!
//! * Hilbert family: `A_i = Q_i H` with `H` the `n x n` Hilbert matrix and
//!   independent Haar-orthogonal `Q_i`.
//! * Frame family: rank-one `A_i = x_i e_i^T` built from the normalized rows of
//!   `B = Q' D P^T`, optionally with `A_1` replaced by `e_1 e_1^T`.

use serde::{Deserialize, Serialize};

use crate::cp_map::ScalingProblem;
use crate::error::{Error, Result};
use crate::linalg::{hilbert, DenseMatrix};

mod file;
mod rng;

pub use file::{load_problem, load_problem_file, save_problem, ProblemFile, ProblemMeta};
pub use rng::{NormalStream, Seed};

/// Haar-distributed orthogonal matrix drawn from stream 0 of `seed`.
pub fn haar_orthogonal(dim: usize, seed: Seed) -> DenseMatrix {
    haar_orthogonal_stream(dim, seed, 0)
}

/// Haar-distributed orthogonal matrix: QR of a standard normal matrix (filled
/// row by row) with the columns of `Q` multiplied by the signs of `diag(R)`.
pub fn haar_orthogonal_stream(dim: usize, seed: Seed, stream: u64) -> DenseMatrix {
    let mut src = NormalStream::new(seed, stream);
    let z = DenseMatrix::from_fn_row_major(dim, dim, |_, _| src.next_normal());
    let qr = z.into_matrix().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    DenseMatrix::from(q)
}

/// `k` matrices `Q_i H_n`, `Q_i` from stream `i` of `seed`.
pub fn hilbert_instance(n: usize, k: usize, seed: Seed) -> Result<ScalingProblem> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidConfig(format!(
            "hilbert instance needs n, k >= 1 (got n={n}, k={k})"
        )));
    }
    let h = hilbert(n);
    let matrices = (0..k)
        .map(|i| &haar_orthogonal_stream(n, seed, i as u64) * &h)
        .collect();
    ScalingProblem::new(matrices)
}

/// Parameters of a frame scaling instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec {
    /// Vector dimension.
    pub n: usize,
    /// Number of vectors, `k >= n`.
    pub k: usize,
    /// Condition parameter of the generator, `> 1`.
    pub kappa: f64,
    /// Replace `A_1` by `e_1 e_1^T`.
    pub extreme: bool,
}

impl FrameSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k < self.n {
            return Err(Error::InvalidConfig(format!(
                "frame instance needs 1 <= n <= k (got n={}, k={})",
                self.n, self.k
            )));
        }
        if !(self.kappa > 1.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "kappa must be finite and > 1, got {}",
                self.kappa
            )));
        }
        Ok(())
    }
}

/// A frame scaling instance in operator form together with its vectors.
#[derive(Clone, Debug)]
pub struct FrameInstance {
    /// `n x k` matrices `A_i = x_i e_i^T`.
    pub problem: ScalingProblem,
    /// The unit vectors `x_i` (with `x_1 = e_1` in the extreme variant).
    pub vectors: Vec<Vec<f64>>,
}

/// Rows of the generator below this norm cannot be normalized.
const MIN_ROW_NORM: f64 = 1e-300;

/// `B = Q' D P^T` with `Q` (`k x k`, stream 0) and `P` (`n x n`, stream 1)
/// Haar, `Q'` the first `n` columns of `Q` and `D` linearly spaced on
/// `[1/κ, 1]` (both endpoints included). `x_i` is row `i` of `B` normalized.
pub fn frame_instance(spec: &FrameSpec, seed: Seed) -> Result<FrameInstance> {
    spec.validate()?;
    let (n, k) = (spec.n, spec.k);
    let q = haar_orthogonal_stream(k, seed, 0);
    let p = haar_orthogonal_stream(n, seed, 1);
    let lo = 1.0 / spec.kappa;
    let diag: Vec<f64> = (0..n)
        .map(|j| {
            if n == 1 {
                1.0
            } else {
                lo + (1.0 - lo) * j as f64 / (n - 1) as f64
            }
        })
        .collect();
    let q_head = DenseMatrix::from_fn(k, n, |i, j| q.get(i, j) * diag[j]);
    let b = q_head.mul_transpose(&p);

    let mut vectors = Vec::with_capacity(k);
    for i in 0..k {
        let row: Vec<f64> = (0..n).map(|j| b.get(i, j)).collect();
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm >= MIN_ROW_NORM) {
            return Err(Error::DegenerateRow { row: i, norm });
        }
        vectors.push(row.into_iter().map(|v| v / norm).collect::<Vec<f64>>());
    }
    if spec.extreme {
        vectors[0] = (0..n).map(|j| if j == 0 { 1.0 } else { 0.0 }).collect();
    }
    let matrices = vectors
        .iter()
        .enumerate()
        .map(|(i, x)| DenseMatrix::from_fn(n, k, |r, c| if c == i { x[r] } else { 0.0 }))
        .collect();
    Ok(FrameInstance {
        problem: ScalingProblem::new(matrices)?,
        vectors,
    })
}
