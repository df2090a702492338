use std::fs;
use std::path::{Path, PathBuf};

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::Args;
use opscale::{save_problem, solve, Algorithm, SolveReport, SolveStatus, SorConfig};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::instance::{generate, Family, FamilyParams, Resolved, Source};
use crate::traces::{write_rows, RuntimeRow, RUNTIME_HEADER, TRACE_HEADER};

fn algorithm_parser() -> impl TypedValueParser<Value = Algorithm> {
    PossibleValuesParser::new(Algorithm::ALL.map(Algorithm::name))
        .map(|s| s.parse::<Algorithm>().expect("restricted to known names"))
}

fn parse_sor(s: &str) -> Result<SorConfig, String> {
    s.parse().map_err(|e: opscale::Error| e.to_string())
}

#[derive(Args, Clone, Debug)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub family: Family,
    #[command(flatten)]
    pub params: FamilyParams,
    /// Output problem file.
    #[arg(long)]
    pub out: PathBuf,
}

/// Solver settings shared by `solve` and `bench`.
#[derive(Args, Clone, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: Source,
    /// Algorithm to run; repeat for several. Defaults to all six.
    #[arg(long = "algo", value_parser = algorithm_parser())]
    pub algos: Vec<Algorithm>,
    /// Relaxation: off, fixed:<w> or auto:<p>. Defaults to auto:5 for
    /// Hilbert problems and auto:20 for frame problems.
    #[arg(long, value_parser = parse_sor)]
    pub omega: Option<SorConfig>,
    /// Iteration cap. Defaults to 100 for Hilbert and 200 for frame problems.
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Stop once the grad norm is at or below this value.
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

/// A validated run configuration.
struct RunConfig {
    resolved: Resolved,
    algos: Vec<Algorithm>,
    sor: SorConfig,
    max_iters: usize,
    tol: f64,
    out: PathBuf,
}

impl RunArgs {
    fn into_config(self) -> CliResult<RunConfig> {
        let resolved = self.source.resolve()?;
        let algos = if self.algos.is_empty() {
            Algorithm::ALL.to_vec()
        } else {
            self.algos
        };
        let sor = self
            .omega
            .unwrap_or(SorConfig::Auto(resolved.defaults.activation));
        let max_iters = self.max_iters.unwrap_or(resolved.defaults.max_iters);
        if max_iters == 0 {
            return Err(CliError::usage("--max-iters must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(CliError::usage(format!(
                "--tol must be positive, got {}",
                self.tol
            )));
        }
        fs::create_dir_all(&self.out).map_err(|e| CliError::file(&self.out, e))?;
        Ok(RunConfig {
            resolved,
            algos,
            sor,
            max_iters,
            tol: self.tol,
            out: self.out,
        })
    }
}

impl RunConfig {
    fn run(&self, algo: Algorithm) -> CliResult<SolveReport> {
        Ok(solve(
            &self.resolved.problem,
            algo,
            self.sor,
            self.max_iters,
            self.tol,
        )?)
    }
}

pub fn gen(args: GenArgs) -> CliResult<()> {
    let resolved = generate(args.family, &args.params)?;
    save_problem(&resolved.problem, &resolved.meta, &args.out)
        .map_err(|e| CliError::file(&args.out, e))?;
    let p = &resolved.problem;
    println!(
        "wrote {} ({}: m={}, n={}, k={}, seed {})",
        args.out.display(),
        resolved.meta.family,
        p.m(),
        p.n(),
        p.k(),
        resolved.meta.seed
    );
    println!("grad norm at identity: {:e}", p.grad_norm());
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a> {
    family: &'a str,
    seed: &'a str,
    spec: &'a serde_json::Value,
    m: usize,
    n: usize,
    k: usize,
    omega: String,
    max_iters: usize,
    tol: f64,
    initial_grad_norm: f64,
    runs: Vec<RunSummary>,
}

#[derive(Serialize)]
struct RunSummary {
    algorithm: String,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    iterations: usize,
    final_grad_norm: f64,
    best_grad_norm: f64,
    omega_estimate: Option<f64>,
    omega_clamped: bool,
    elapsed_s: f64,
}

impl From<&SolveReport> for RunSummary {
    fn from(r: &SolveReport) -> Self {
        RunSummary {
            algorithm: r.algorithm.name().into(),
            status: r.status.label(),
            reason: match &r.status {
                SolveStatus::Diverged(why) => Some(why.clone()),
                _ => None,
            },
            iterations: r.trace.len(),
            final_grad_norm: r.final_grad_norm(),
            best_grad_norm: r.best_grad_norm(),
            omega_estimate: r.omega_estimate,
            omega_clamped: r.omega_clamped,
            elapsed_s: r.trace.last().map_or(0.0, |t| t.elapsed),
        }
    }
}

fn print_run(r: &SolveReport) {
    println!(
        "{:>13}  {:<9}  iters {:>4}  grad norm {:.3e}  omega {}",
        r.algorithm.name(),
        r.status.label(),
        r.trace.len(),
        r.final_grad_norm(),
        r.omega_estimate
            .map_or_else(|| "-".to_string(), |w| format!("{w:.4}")),
    );
}

pub fn solve_cmd(args: RunArgs) -> CliResult<()> {
    let cfg = args.into_config()?;
    let mut runs = Vec::with_capacity(cfg.algos.len());
    for &algo in &cfg.algos {
        let report = cfg.run(algo)?;
        let path = cfg.out.join(format!("{}.csv", algo.name()));
        write_rows(&path, &report.trace, &TRACE_HEADER)?;
        print_run(&report);
        runs.push(RunSummary::from(&report));
    }
    let p = &cfg.resolved.problem;
    let meta = &cfg.resolved.meta;
    let summary = Summary {
        family: &meta.family,
        seed: &meta.seed,
        spec: &meta.spec,
        m: p.m(),
        n: p.n(),
        k: p.k(),
        omega: cfg.sor.to_string(),
        max_iters: cfg.max_iters,
        tol: cfg.tol,
        initial_grad_norm: p.grad_norm(),
        runs,
    };
    write_json(&cfg.out.join("summary.json"), &summary)
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("summary serializes");
    fs::write(path, text + "\n").map_err(|e| CliError::file(path, e))
}

#[derive(Args, Clone, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Timed runs per algorithm (at least 2). With 3 or more, one extra
    /// warm-up run precedes them and is discarded.
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
}

/// Per-iteration mean and sample standard deviation over the repeats.
fn runtime_rows(algo: Algorithm, runs: &[SolveReport]) -> CliResult<Vec<RuntimeRow>> {
    let reference = &runs[0].trace;
    if runs.iter().any(|r| r.trace.len() != reference.len()) {
        return Err(CliError::Data(format!(
            "{algo}: repeats produced traces of different lengths"
        )));
    }
    let count = runs.len() as f64;
    let mut rows = Vec::with_capacity(reference.len());
    for (i, row) in reference.iter().enumerate() {
        if runs
            .iter()
            .any(|r| r.trace[i].grad_norm.to_bits() != row.grad_norm.to_bits())
        {
            return Err(CliError::Data(format!(
                "{algo}: grad norm differs between repeats at iteration {}",
                row.iter
            )));
        }
        let times: Vec<f64> = runs.iter().map(|r| r.trace[i].elapsed).collect();
        let mean = times.iter().sum::<f64>() / count;
        let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (count - 1.0);
        rows.push(RuntimeRow {
            iter: row.iter,
            algorithm: algo.name().into(),
            grad_norm: row.grad_norm,
            mean_elapsed_s: mean,
            std_elapsed_s: var.sqrt(),
        });
    }
    Ok(rows)
}

pub fn bench(args: BenchArgs) -> CliResult<()> {
    if args.repeats < 2 {
        return Err(CliError::usage(format!(
            "--repeats must be at least 2, got {}",
            args.repeats
        )));
    }
    let cfg = args.run.into_config()?;
    let mut rows = Vec::new();
    for &algo in &cfg.algos {
        if args.repeats >= 3 {
            cfg.run(algo)?;
        }
        let runs = (0..args.repeats)
            .map(|_| cfg.run(algo))
            .collect::<CliResult<Vec<_>>>()?;
        let algo_rows = runtime_rows(algo, &runs)?;
        if let Some(last) = algo_rows.last() {
            println!(
                "{:>13}  iters {:>4}  grad norm {:.3e}  time {:.3e} s ± {:.1e}",
                algo.name(),
                last.iter,
                last.grad_norm,
                last.mean_elapsed_s,
                last.std_elapsed_s
            );
        }
        rows.extend(algo_rows);
    }
    write_rows(&cfg.out.join("runtime.csv"), &rows, &RUNTIME_HEADER)
}
