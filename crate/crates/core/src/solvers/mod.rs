//! Iteration schemes for the operator scaling problem and the driver that
//! runs them with convergence tracing.
//!
//! | [`Algorithm`]   | form        | relaxation                     |
//! |-----------------|-------------|--------------------------------|
//! | `Fpi`           | fixed point | none                           |
//! | `Osi`           | Sinkhorn    | none                           |
//! | `FpiCholSor`    | fixed point | linear, inverse Cholesky factor|
//! | `OsiCholSor`    | Sinkhorn    | linear, inverse Cholesky factor|
//! | `FpiGeoSor`     | fixed point | geodesic in the SPD cone       |
//! | `OsiGeoSor`     | Sinkhorn    | geodesic in the SPD cone       |
//!
//! Paired fixed-point and Sinkhorn forms generate the same scaled matrices
//! in exact arithmetic (up to orthogonal factors for the unrelaxed pair).
//! The Sinkhorn forms only ever factor Gram sums that approach multiples of
//! the identity, which keeps them accurate on ill-conditioned data.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cp_map::{ScalingPair, ScalingProblem};
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SpdMatrix};

mod omega;
mod steps;

pub use omega::{estimate_omega, estimate_omega_detailed, OmegaEstimate, MAX_RATE};
pub use steps::{
    fpi_chol_sor_step, fpi_geo_sor_step, fpi_step, osi_chol_sor_step, osi_geo_sor_step, osi_step,
    AbsorbedState,
};

/// Growth of the grad norm over its initial value that counts as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Fpi,
    Osi,
    FpiCholSor,
    OsiCholSor,
    FpiGeoSor,
    OsiGeoSor,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Fpi,
        Algorithm::Osi,
        Algorithm::FpiCholSor,
        Algorithm::OsiCholSor,
        Algorithm::FpiGeoSor,
        Algorithm::OsiGeoSor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Fpi => "fpi",
            Algorithm::Osi => "osi",
            Algorithm::FpiCholSor => "fpi-chol-sor",
            Algorithm::OsiCholSor => "osi-chol-sor",
            Algorithm::FpiGeoSor => "fpi-geo-sor",
            Algorithm::OsiGeoSor => "osi-geo-sor",
        }
    }

    /// Sinkhorn form (scalings absorbed on the fly).
    pub fn is_osi(self) -> bool {
        matches!(
            self,
            Algorithm::Osi | Algorithm::OsiCholSor | Algorithm::OsiGeoSor
        )
    }

    pub fn is_relaxed(self) -> bool {
        !matches!(self, Algorithm::Fpi | Algorithm::Osi)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm `{s}`")))
    }
}

/// How the relaxation parameter is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SorConfig {
    /// `ω = 1` throughout.
    Off,
    /// Constant `ω ∈ (0, 2)`.
    Fixed(f64),
    /// `ω = 1` for the first `p` iterations, then the estimate from
    /// `err_p / err_{p−2}`, frozen for the rest of the run.
    Auto(usize),
}

impl SorConfig {
    pub fn fixed(omega: f64) -> Result<Self> {
        if omega.is_finite() && omega > 0.0 && omega < 2.0 {
            Ok(SorConfig::Fixed(omega))
        } else {
            Err(Error::InvalidConfig(format!(
                "fixed ω must lie in (0, 2), got {omega}"
            )))
        }
    }

    pub fn auto(p: usize) -> Result<Self> {
        if p >= 2 {
            Ok(SorConfig::Auto(p))
        } else {
            Err(Error::InvalidConfig(format!(
                "auto ω needs activation iteration p >= 2, got {p}"
            )))
        }
    }

    fn validate(self) -> Result<Self> {
        match self {
            SorConfig::Off => Ok(self),
            SorConfig::Fixed(w) => SorConfig::fixed(w),
            SorConfig::Auto(p) => SorConfig::auto(p),
        }
    }
}

impl fmt::Display for SorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SorConfig::Off => f.write_str("off"),
            SorConfig::Fixed(w) => write!(f, "fixed:{w}"),
            SorConfig::Auto(p) => write!(f, "auto:{p}"),
        }
    }
}

/// Parses `off`, `fixed:<ω>` or `auto:<p>`.
impl FromStr for SorConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad =
            || Error::InvalidConfig(format!("expected off, fixed:<w> or auto:<p>, got `{s}`"));
        match s.split_once(':') {
            None if s == "off" => Ok(SorConfig::Off),
            Some(("fixed", w)) => SorConfig::fixed(w.parse().map_err(|_| bad())?),
            Some(("auto", p)) => SorConfig::auto(p.parse().map_err(|_| bad())?),
            _ => Err(bad()),
        }
    }
}

/// Iterate of a running solve.
#[derive(Clone, Debug)]
pub enum SolverState {
    /// Scaling factors `(L_t, R_t)` of the fixed-point forms with triangular updates.
    Factors(ScalingPair),
    /// `(X_t, Y_t) = (L_t^T L_t, R_t^T R_t)` of the geodesic fixed-point form.
    Grams { x: SpdMatrix, y: SpdMatrix },
    /// Scaled matrices plus accumulated factors of the Sinkhorn forms.
    Absorbed(AbsorbedState),
}

impl SolverState {
    /// Identity initialization.
    pub fn initial(p: &ScalingProblem, algo: Algorithm) -> Self {
        match algo {
            Algorithm::Fpi | Algorithm::FpiCholSor => {
                SolverState::Factors(ScalingPair::identity(p.m(), p.n()))
            }
            Algorithm::FpiGeoSor => SolverState::Grams {
                x: SpdMatrix::identity(p.m()),
                y: SpdMatrix::identity(p.n()),
            },
            _ => SolverState::Absorbed(AbsorbedState::new(p)),
        }
    }

    /// A pair `(L, R)` such that the current scaled matrices are `L A_i R^T`.
    /// For the Gram form `L` and `R` are transposed Cholesky factors of `X`, `Y`.
    pub fn scaling_pair(&self) -> ScalingPair {
        match self {
            SolverState::Factors(pair) => pair.clone(),
            SolverState::Grams { x, y } => ScalingPair {
                left: x.cholesky().as_dense().transpose(),
                right: y.cholesky().as_dense().transpose(),
            },
            SolverState::Absorbed(st) => st.accumulated.clone(),
        }
    }

    /// The current scaled matrices.
    pub fn scaled_matrices(&self, p: &ScalingProblem) -> Result<Vec<DenseMatrix>> {
        match self {
            SolverState::Absorbed(st) => Ok(st.current.matrices().to_vec()),
            other => p.scaled_matrices(&other.scaling_pair()),
        }
    }

    /// Grad norm of the current scaled matrices.
    pub fn grad_norm(&self, p: &ScalingProblem) -> Result<f64> {
        match self {
            SolverState::Absorbed(st) => Ok(st.current.grad_norm()),
            other => p.scaled_grad_norm(&other.scaling_pair()),
        }
    }
}

/// One step of `algo` with relaxation parameter `omega` (ignored by the
/// unrelaxed schemes).
pub fn advance(
    p: &ScalingProblem,
    algo: Algorithm,
    state: &SolverState,
    omega: f64,
) -> Result<SolverState> {
    match (algo, state) {
        (Algorithm::Fpi, SolverState::Factors(pair)) => {
            Ok(SolverState::Factors(fpi_step(p, pair)?))
        }
        (Algorithm::FpiCholSor, SolverState::Factors(pair)) => {
            Ok(SolverState::Factors(fpi_chol_sor_step(p, pair, omega)?))
        }
        (Algorithm::FpiGeoSor, SolverState::Grams { x, y }) => {
            let (x, y) = fpi_geo_sor_step(p, x, y, omega)?;
            Ok(SolverState::Grams { x, y })
        }
        (Algorithm::Osi, SolverState::Absorbed(st)) => Ok(SolverState::Absorbed(osi_step(st)?)),
        (Algorithm::OsiCholSor, SolverState::Absorbed(st)) => {
            Ok(SolverState::Absorbed(osi_chol_sor_step(st, omega)?))
        }
        (Algorithm::OsiGeoSor, SolverState::Absorbed(st)) => {
            Ok(SolverState::Absorbed(osi_geo_sor_step(st, omega)?))
        }
        (algo, _) => Err(Error::InvalidConfig(format!(
            "state does not match algorithm {algo}"
        ))),
    }
}

/// One trace line, written after every iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub grad_norm: f64,
    /// Cumulative seconds since the solve started (monotonic clock).
    #[serde(rename = "elapsed_s")]
    pub elapsed: f64,
    #[serde(rename = "omega")]
    pub omega_used: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveStatus {
    Converged,
    MaxIters,
    Diverged(String),
}

impl SolveStatus {
    pub fn label(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIters => "max_iters",
            SolveStatus::Diverged(_) => "diverged",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub status: SolveStatus,
    pub trace: Vec<TraceRow>,
    pub final_state: SolverState,
    /// Grad norm of the unscaled problem (iteration 0).
    pub initial_grad_norm: f64,
    /// The automatically chosen ω, once activated.
    pub omega_estimate: Option<f64>,
    /// The error ratio at activation was `>= 1` and the rate estimate was clamped.
    pub omega_clamped: bool,
}

impl SolveReport {
    pub fn final_grad_norm(&self) -> f64 {
        self.trace
            .last()
            .map_or(self.initial_grad_norm, |r| r.grad_norm)
    }

    pub fn best_grad_norm(&self) -> f64 {
        self.trace
            .iter()
            .map(|r| r.grad_norm)
            .fold(self.initial_grad_norm, f64::min)
    }

    /// First iteration whose grad norm is at or below `level`.
    pub fn iterations_to(&self, level: f64) -> Option<usize> {
        self.trace
            .iter()
            .find(|r| r.grad_norm <= level)
            .map(|r| r.iter)
    }
}

/// Runs `algo` from identity initialization until the grad norm drops to
/// `tol`, `max_iters` iterations are spent, or the iteration breaks down.
///
/// Breakdown (failed factorization, non-finite or exploding grad norm) is
/// reported as [`SolveStatus::Diverged`]; only invalid arguments are errors.
pub fn solve(
    p: &ScalingProblem,
    algo: Algorithm,
    sor: SorConfig,
    max_iters: usize,
    tol: f64,
) -> Result<SolveReport> {
    let sor = sor.validate()?;
    if max_iters == 0 {
        return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "tolerance must be positive, got {tol}"
        )));
    }

    let initial_grad_norm = p.grad_norm();
    let mut state = SolverState::initial(p, algo);
    let mut trace: Vec<TraceRow> = Vec::with_capacity(max_iters);
    let mut omega = match (algo.is_relaxed(), sor) {
        (true, SorConfig::Fixed(w)) => w,
        _ => 1.0,
    };
    let mut omega_estimate = None;
    let mut omega_clamped = false;
    let mut status = SolveStatus::MaxIters;
    let start = Instant::now();

    for iter in 1..=max_iters {
        let next = match advance(p, algo, &state, omega) {
            Ok(s) => s,
            Err(e) => {
                status = SolveStatus::Diverged(format!("iteration {iter}: {e}"));
                break;
            }
        };
        let grad_norm = match next.grad_norm(p) {
            Ok(g) => g,
            Err(e) => {
                status = SolveStatus::Diverged(format!("iteration {iter}: {e}"));
                break;
            }
        };
        state = next;
        trace.push(TraceRow {
            iter,
            grad_norm,
            elapsed: start.elapsed().as_secs_f64(),
            omega_used: omega,
        });

        if !grad_norm.is_finite() || grad_norm > DIVERGENCE_FACTOR * initial_grad_norm {
            status = SolveStatus::Diverged(format!(
                "iteration {iter}: grad norm {grad_norm:e} exceeds {DIVERGENCE_FACTOR:e} x initial {initial_grad_norm:e}"
            ));
            break;
        }
        if grad_norm <= tol {
            status = SolveStatus::Converged;
            break;
        }
        if let (true, SorConfig::Auto(p_act)) = (algo.is_relaxed(), sor) {
            if iter == p_act {
                let err_p = grad_norm;
                let err_pm2 = if p_act == 2 {
                    initial_grad_norm
                } else {
                    trace[p_act - 3].grad_norm
                };
                let est = estimate_omega_detailed(err_p, err_pm2);
                omega = est.omega;
                omega_estimate = Some(est.omega);
                omega_clamped = est.clamped;
            }
        }
    }

    Ok(SolveReport {
        algorithm: algo,
        status,
        trace,
        final_state: state,
        initial_grad_norm,
        omega_estimate,
        omega_clamped,
    })
}
