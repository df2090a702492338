//! Operator scaling of completely positive maps.
//!
//! Given `A_1, …, A_k ∈ R^{m×n}`, find invertible `L`, `R` such that the
//! scaled matrices `L A_i R^T` satisfy
//!
//! ```text
//! Σ Ā_i Ā_i^T = I_m / m,      Σ Ā_i^T Ā_i = I_n / n.
//! ```
//!
//! The crate provides the operator Sinkhorn iteration in its fixed-point and
//! on-the-fly scaling forms, their Cholesky-factor and geodesic
//! overrelaxations, instance generators and a tracing solve driver.
//!
//! ```
//! use opscale::{hilbert_instance, solve, Algorithm, Seed, SorConfig};
//!
//! let problem = hilbert_instance(5, 7, Seed(1)).unwrap();
//! let report = solve(&problem, Algorithm::OsiGeoSor, SorConfig::Auto(5), 100, 1e-12).unwrap();
//! assert!(report.final_grad_norm() <= 1e-12);
//! ```

pub mod cp_map;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod solvers;

pub use cp_map::{frame_recover, frame_residual, FrameScaling, ScalingPair, ScalingProblem};
pub use error::{Error, FormatError, Result};
pub use instances::{
    frame_instance, haar_orthogonal, hilbert_instance, load_problem, load_problem_file,
    save_problem, FrameInstance, FrameSpec, ProblemMeta, Seed,
};
pub use linalg::{DenseMatrix, LowerTriangular, SpdMatrix};
pub use solvers::{
    estimate_omega, solve, Algorithm, SolveReport, SolveStatus, SolverState, SorConfig, TraceRow,
};
