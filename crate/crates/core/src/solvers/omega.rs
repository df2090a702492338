//! Relaxation parameter estimate from the observed convergence rate of the
//! unrelaxed iteration.

/// Upper clamp applied to the squared rate estimate.
pub const MAX_RATE: f64 = 1.0 - 1e-12;

/// Outcome of [`estimate_omega_detailed`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaEstimate {
    pub omega: f64,
    /// Squared rate after clamping to `[0, MAX_RATE]`.
    pub rate: f64,
    /// The error ratio was `>= 1` and the rate had to be clamped.
    pub clamped: bool,
}

/// `ω = 2 / (1 + sqrt(1 − β²))` with `β² = sqrt(err_p / err_{p−2})`.
/// Always returns a value in `[1, 2)`.
pub fn estimate_omega(err_p: f64, err_pm2: f64) -> f64 {
    estimate_omega_detailed(err_p, err_pm2).omega
}

pub fn estimate_omega_detailed(err_p: f64, err_pm2: f64) -> OmegaEstimate {
    let ratio = if err_pm2 > 0.0 {
        err_p.max(0.0) / err_pm2
    } else {
        f64::NAN
    };
    let raw = ratio.sqrt();
    // NaN (zero or invalid denominator) falls through to the unrelaxed value.
    let (rate, clamped) = if raw.is_nan() {
        (0.0, false)
    } else if raw > MAX_RATE {
        (MAX_RATE, true)
    } else {
        (raw, false)
    };
    OmegaEstimate {
        omega: 2.0 / (1.0 + (1.0 - rate).sqrt()),
        rate,
        clamped,
    }
}
