#![allow(dead_code)]

use opscale::instances::haar_orthogonal_stream;
use opscale::{DenseMatrix, ScalingProblem, Seed, SpdMatrix};

/// `A_i = c Q_i diag(1, …, 10) P_i^T` with Haar `Q_i`, `P_i`: every `A_i`
/// has condition number 10 in exact arithmetic. `c` normalizes
/// `tr Σ A_i A_i^T` to 1, the balanced value, so relaxed factors started at
/// the identity keep positive diagonals.
pub fn well_conditioned(n: usize, k: usize, seed: Seed) -> ScalingProblem {
    let sigma: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                1.0
            } else {
                1.0 + 9.0 * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let d = DenseMatrix::from_diagonal(&sigma);
    let matrices = (0..k as u64)
        .map(|i| {
            let q = haar_orthogonal_stream(n, seed, 2 * i);
            let p = haar_orthogonal_stream(n, seed, 2 * i + 1);
            (&q * &d).mul_transpose(&p)
        })
        .collect::<Vec<_>>();
    let total: f64 = matrices.iter().map(|a| a.frobenius_norm().powi(2)).sum();
    let c = total.sqrt().recip();
    ScalingProblem::new(matrices.iter().map(|a| a.scale(c)).collect()).unwrap()
}

/// `A_i = Q_i / √(k n)`: already doubly balanced.
pub fn balanced(n: usize, k: usize, seed: Seed) -> ScalingProblem {
    let c = 1.0 / ((k * n) as f64).sqrt();
    let matrices = (0..k as u64)
        .map(|i| haar_orthogonal_stream(n, seed, i).scale(c))
        .collect();
    ScalingProblem::new(matrices).unwrap()
}

/// `B B^T + shift I` from row-major `B` entries.
pub fn spd_from(dim: usize, entries: &[f64], shift: f64) -> SpdMatrix {
    let b = DenseMatrix::from_row_major(dim, dim, entries[..dim * dim].to_vec()).unwrap();
    let s = &b.mul_transpose(&b) + &DenseMatrix::scaled_identity(dim, shift);
    SpdMatrix::from_symmetrized(s).unwrap()
}

pub fn rel_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    (a - b).frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
}

/// Largest relative difference between two lists of matrices.
pub fn max_rel_diff(a: &[DenseMatrix], b: &[DenseMatrix]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| rel_diff(x, y))
        .fold(0.0, f64::max)
}

/// Largest absolute difference between the singular values of paired matrices.
pub fn singular_value_gap(a: &[DenseMatrix], b: &[DenseMatrix]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| {
            x.singular_values()
                .into_iter()
                .zip(y.singular_values())
                .map(|(s, t)| (s - t).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max)
}

use opscale::solvers::{
    fpi_chol_sor_step, fpi_geo_sor_step, fpi_step, osi_chol_sor_step, osi_geo_sor_step, osi_step,
    AbsorbedState,
};
use opscale::ScalingPair;

/// Runs the fixed-point and Sinkhorn forms of the Cholesky relaxation side by
/// side and returns `max_{t,i} ‖Ā_{t,i} − L_t A_i R_t^T‖_F / ‖A_i‖_F`.
pub fn cholesky_sor_equivalence(p: &ScalingProblem, omega: f64, iters: usize) -> f64 {
    let mut pair = ScalingPair::identity(p.m(), p.n());
    let mut absorbed = AbsorbedState::new(p);
    let mut worst = 0.0_f64;
    for _ in 0..iters {
        pair = fpi_chol_sor_step(p, &pair, omega).unwrap();
        absorbed = osi_chol_sor_step(&absorbed, omega).unwrap();
        let rebuilt = p.scaled_matrices(&pair).unwrap();
        for ((bar, re), a) in absorbed
            .current
            .matrices()
            .iter()
            .zip(&rebuilt)
            .zip(p.matrices())
        {
            worst = worst.max((bar - re).frobenius_norm() / a.frobenius_norm());
        }
    }
    worst
}

/// Runs the two geodesic relaxations side by side and returns the largest
/// of `‖X_t − L_t^T L_t‖_F / ‖X_t‖_F` and `‖Y_t − R_t^T R_t‖_F / ‖Y_t‖_F`.
pub fn geodesic_sor_equivalence(p: &ScalingProblem, omega: f64, iters: usize) -> f64 {
    let mut x = SpdMatrix::identity(p.m());
    let mut y = SpdMatrix::identity(p.n());
    let mut absorbed = AbsorbedState::new(p);
    let mut worst = 0.0_f64;
    for _ in 0..iters {
        (x, y) = fpi_geo_sor_step(p, &x, &y, omega).unwrap();
        absorbed = osi_geo_sor_step(&absorbed, omega).unwrap();
        let l = &absorbed.accumulated.left;
        let r = &absorbed.accumulated.right;
        worst = worst
            .max(rel_diff(&l.transpose_mul(l), x.as_dense()))
            .max(rel_diff(&r.transpose_mul(r), y.as_dense()));
    }
    worst
}

/// Largest singular-value gap between `L_t A_i R_t^T` (fixed-point form) and
/// `Ā_{t,i}` (Sinkhorn form) over the first `iters` plain iterations.
pub fn fpi_osi_singular_value_gap(p: &ScalingProblem, iters: usize) -> f64 {
    let mut pair = ScalingPair::identity(p.m(), p.n());
    let mut absorbed = AbsorbedState::new(p);
    let mut worst = 0.0_f64;
    for _ in 0..iters {
        pair = fpi_step(p, &pair).unwrap();
        absorbed = osi_step(&absorbed).unwrap();
        let fixed_point = p.scaled_matrices(&pair).unwrap();
        worst = worst.max(singular_value_gap(
            &fixed_point,
            absorbed.current.matrices(),
        ));
    }
    worst
}

/// Per-iterate gaps between the relaxed schemes at `ω = 1` and the plain
/// ones: `(fixed-point form, Sinkhorn form)`, both relative Frobenius.
pub fn unit_omega_gaps(p: &ScalingProblem, iters: usize) -> (f64, f64) {
    let mut plain = ScalingPair::identity(p.m(), p.n());
    let mut relaxed = plain.clone();
    let mut osi = AbsorbedState::new(p);
    let mut osi_relaxed = osi.clone();
    let (mut fpi_gap, mut osi_gap) = (0.0_f64, 0.0_f64);
    for _ in 0..iters {
        plain = fpi_step(p, &plain).unwrap();
        relaxed = fpi_chol_sor_step(p, &relaxed, 1.0).unwrap();
        fpi_gap = fpi_gap
            .max(rel_diff(&relaxed.left, &plain.left))
            .max(rel_diff(&relaxed.right, &plain.right));
        osi = osi_step(&osi).unwrap();
        osi_relaxed = osi_chol_sor_step(&osi_relaxed, 1.0).unwrap();
        osi_gap = osi_gap.max(max_rel_diff(
            osi_relaxed.current.matrices(),
            osi.current.matrices(),
        ));
    }
    (fpi_gap, osi_gap)
}

/// Largest Frobenius change of the scaled matrices after one step of any
/// algorithm from the identity scaling, over the given relaxation values.
pub fn fixed_point_drift(p: &ScalingProblem, omegas: &[f64]) -> f64 {
    use opscale::solvers::advance;
    use opscale::{Algorithm, SolverState};
    let mut worst = 0.0_f64;
    for algo in Algorithm::ALL {
        for &omega in omegas {
            let start = SolverState::initial(p, algo);
            let next = advance(p, algo, &start, omega).unwrap();
            let moved = next.scaled_matrices(p).unwrap();
            for (a, b) in moved.iter().zip(p.matrices()) {
                worst = worst.max((a - b).frobenius_norm());
            }
        }
    }
    worst
}
