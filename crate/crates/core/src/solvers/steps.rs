//! Single iterations of the six scaling schemes.
//!
//! The fixed-point forms keep the original matrices and update the scaling
//! factors (or their Gram matrices). The Sinkhorn forms absorb each
//! half-step scaling into the matrices immediately and keep the running
//! products `L_t = L̄_t ⋯ L̄_1`, `R_t = R̄_t ⋯ R̄_1` for book-keeping.

use crate::cp_map::{left_gram_of, right_gram_of, ScalingPair, ScalingProblem};
use crate::error::{Error, Result};
use crate::linalg::{cholesky_factor, geodesic_sharp, spd_power, DenseMatrix, SpdMatrix};

/// State of the Sinkhorn-form iterations: the current scaled matrices
/// `Ā_{t,i}` and the accumulated pair with `Ā_{t,i} = L_t A_i R_t^T`.
#[derive(Clone, Debug)]
pub struct AbsorbedState {
    pub current: ScalingProblem,
    pub accumulated: ScalingPair,
}

impl AbsorbedState {
    pub fn new(p: &ScalingProblem) -> Self {
        Self {
            current: p.clone(),
            accumulated: ScalingPair::identity(p.m(), p.n()),
        }
    }

    /// Largest relative Frobenius deviation between the current matrices and
    /// `L_t A_i R_t^T` recomputed from the original problem.
    pub fn reproduction_error(&self, original: &ScalingProblem) -> Result<f64> {
        let rebuilt = original.scaled_matrices(&self.accumulated)?;
        Ok(self
            .current
            .matrices()
            .iter()
            .zip(&rebuilt)
            .map(|(cur, reb)| {
                (cur - reb).frobenius_norm() / reb.frobenius_norm().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max))
    }

    /// Absorbs one half-step pair and accumulates it.
    fn absorb(&self, left_scaled: Vec<DenseMatrix>, step: ScalingPair) -> AbsorbedState {
        let matrices = left_scaled
            .iter()
            .map(|b| b.mul_transpose(&step.right))
            .collect();
        AbsorbedState {
            current: ScalingProblem::from_parts_unchecked(
                self.current.m(),
                self.current.n(),
                matrices,
            ),
            accumulated: self.accumulated.then(&step),
        }
    }
}

/// `C^{-1}` for the lower Cholesky factor `C` of the Gram matrix.
fn inverse_cholesky(gram: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(cholesky_factor(gram)?.inverse()?.into_dense())
}

/// `(1 − ω) prev + (ω / √dim) inv`.
fn relax(prev: &DenseMatrix, inv: &DenseMatrix, omega: f64) -> DenseMatrix {
    let dim = inv.rows() as f64;
    &prev.scale(1.0 - omega) + &inv.scale(omega / dim.sqrt())
}

fn check_factor(m: DenseMatrix, which: &str) -> Result<DenseMatrix> {
    if m.is_finite() {
        Ok(m)
    } else {
        Err(Error::NotPositiveDefinite(format!(
            "{which} factor became non-finite"
        )))
    }
}

/// `Σ (A_i R^T)(A_i R^T)^T`.
fn left_weighted_gram(p: &ScalingProblem, right: &DenseMatrix) -> DenseMatrix {
    let scaled: Vec<DenseMatrix> = p
        .matrices()
        .iter()
        .map(|a| a.mul_transpose(right))
        .collect();
    left_gram_of(p.m(), &scaled)
}

/// `Σ (L A_i)^T (L A_i)`.
fn right_weighted_gram(p: &ScalingProblem, left: &DenseMatrix) -> DenseMatrix {
    let scaled: Vec<DenseMatrix> = p.matrices().iter().map(|a| left * a).collect();
    right_gram_of(p.n(), &scaled)
}

/// Alternating fixed-point iteration with lower Cholesky factors.
pub fn fpi_step(p: &ScalingProblem, state: &ScalingPair) -> Result<ScalingPair> {
    let sqrt_m = (p.m() as f64).sqrt();
    let sqrt_n = (p.n() as f64).sqrt();
    let left = inverse_cholesky(&left_weighted_gram(p, &state.right))?.scale(1.0 / sqrt_m);
    let right = inverse_cholesky(&right_weighted_gram(p, &left))?.scale(1.0 / sqrt_n);
    Ok(ScalingPair { left, right })
}

/// Fixed-point iteration with linear overrelaxation of the inverse Cholesky
/// factors: `L_{t+1} = (1 − ω) L_t + (ω/√m) C_t^{-1}`, likewise for `R`
/// using the already updated `L_{t+1}`.
pub fn fpi_chol_sor_step(
    p: &ScalingProblem,
    state: &ScalingPair,
    omega: f64,
) -> Result<ScalingPair> {
    let c_inv = inverse_cholesky(&left_weighted_gram(p, &state.right))?;
    let left = check_factor(relax(&state.left, &c_inv, omega), "left")?;
    let d_inv = inverse_cholesky(&right_weighted_gram(p, &left))?;
    let right = check_factor(relax(&state.right, &d_inv, omega), "right")?;
    Ok(ScalingPair { left, right })
}

/// Fixed-point iteration with geodesic overrelaxation on
/// `(X, Y) = (L^T L, R^T R)`:
///
/// ```text
/// X_{t+1} = X_t #_ω [(1/m) Φ(Y_t)^{-1}]
/// Y_{t+1} = Y_t #_ω [(1/n) Φ*(X_{t+1})^{-1}]
/// ```
pub fn fpi_geo_sor_step(
    p: &ScalingProblem,
    x: &SpdMatrix,
    y: &SpdMatrix,
    omega: f64,
) -> Result<(SpdMatrix, SpdMatrix)> {
    let target_x = spd_power(&p.phi(y)?, -1.0)?.scale(1.0 / p.m() as f64)?;
    let x_next = geodesic_sharp(x, &target_x, omega)?;
    let target_y = spd_power(&p.phi_adjoint(&x_next)?, -1.0)?.scale(1.0 / p.n() as f64)?;
    let y_next = geodesic_sharp(y, &target_y, omega)?;
    Ok((x_next, y_next))
}

/// Operator Sinkhorn iteration: rebalance the left Gram sum, then the right
/// one, absorbing both triangular scalings into the matrices.
pub fn osi_step(state: &AbsorbedState) -> Result<AbsorbedState> {
    osi_chol_sor_step(state, 1.0)
}

/// Sinkhorn form of the Cholesky-factor overrelaxation. The previous factors
/// are implicitly identities: `L̄_{t+1} = (1 − ω) I + (ω/√m) C̄_t^{-1}`.
pub fn osi_chol_sor_step(state: &AbsorbedState, omega: f64) -> Result<AbsorbedState> {
    let cur = &state.current;
    let c_inv = inverse_cholesky(&cur.left_gram())?;
    let left = check_factor(
        relax(&DenseMatrix::identity(cur.m()), &c_inv, omega),
        "left",
    )?;
    let left_scaled: Vec<DenseMatrix> = cur.matrices().iter().map(|a| &left * a).collect();
    let d_inv = inverse_cholesky(&right_gram_of(cur.n(), &left_scaled))?;
    let right = check_factor(
        relax(&DenseMatrix::identity(cur.n()), &d_inv, omega),
        "right",
    )?;
    Ok(state.absorb(left_scaled, ScalingPair { left, right }))
}

/// Sinkhorn form of the geodesic overrelaxation with symmetric factors:
/// `L̄_{t+1} = (m Σ Ā Ā^T)^{-ω/2}`, `R̄_{t+1} = (n Σ Ā^T L̄^T L̄ Ā)^{-ω/2}`.
pub fn osi_geo_sor_step(state: &AbsorbedState, omega: f64) -> Result<AbsorbedState> {
    let cur = &state.current;
    let left_gram = SpdMatrix::from_symmetrized(cur.left_gram().scale(cur.m() as f64))?;
    let left = spd_power(&left_gram, -omega / 2.0)?.into_dense();
    let left_scaled: Vec<DenseMatrix> = cur.matrices().iter().map(|a| &left * a).collect();
    let right_gram =
        SpdMatrix::from_symmetrized(right_gram_of(cur.n(), &left_scaled).scale(cur.n() as f64))?;
    let right = spd_power(&right_gram, -omega / 2.0)?.into_dense();
    Ok(state.absorb(left_scaled, ScalingPair { left, right }))
}
