//! Runs the three experiment families with every algorithm and prints a
//! one-line summary per run.
//!
//! ```text
//! cargo run --release -p opscale --example experiments -- [seed]
//! ```

use opscale::{
    frame_instance, hilbert_instance, solve, Algorithm, FrameSpec, ScalingProblem, Seed, SorConfig,
};

fn run(label: &str, p: &ScalingProblem, p_act: usize, max_iters: usize, tol: f64) {
    println!("== {label} (initial grad norm {:.3e})", p.grad_norm());
    for algo in Algorithm::ALL {
        let r = solve(p, algo, SorConfig::Auto(p_act), max_iters, tol).expect("valid config");
        println!(
            "{:>13}  {:>9}  iters {:>4}  final {:.3e}  best {:.3e}  to1e-8 {:>5}  omega {:<8}  {:.3}s",
            algo.name(),
            r.status.label(),
            r.trace.len(),
            r.final_grad_norm(),
            r.best_grad_norm(),
            r.iterations_to(1e-8).map_or("-".into(), |i| i.to_string()),
            r.omega_estimate.map_or("-".into(), |w| format!("{w:.4}")),
            r.trace.last().map_or(0.0, |t| t.elapsed),
        );
        if let opscale::SolveStatus::Diverged(why) = &r.status {
            println!("               {why}");
        }
    }
}

fn main() {
    let seed = Seed(
        std::env::args()
            .nth(1)
            .and_then(|s| s.parse().ok())
            .unwrap_or(1),
    );
    let hilbert = hilbert_instance(5, 7, seed).expect("hilbert instance");
    run("hilbert n=5 k=7", &hilbert, 5, 100, 1e-13);

    let frame = frame_instance(
        &FrameSpec {
            n: 50,
            k: 55,
            kappa: 1e7,
            extreme: false,
        },
        seed,
    )
    .expect("frame instance");
    run("frame n=50 k=55 kappa=1e7", &frame.problem, 20, 200, 1e-13);

    let extreme = frame_instance(
        &FrameSpec {
            n: 50,
            k: 52,
            kappa: 1e7,
            extreme: true,
        },
        seed,
    )
    .expect("frame instance");
    run("extreme n=50 k=52", &extreme.problem, 20, 200, 1e-13);
}
