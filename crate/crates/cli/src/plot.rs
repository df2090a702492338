//! Self-contained matplotlib scripts for convergence traces.
//!
//! The generated script embeds the data, draws log-scale grad norm against
//! iteration and against runtime, and saves a figure. Fixed-point forms are
//! drawn solid and Sinkhorn forms dashed.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;

use crate::error::{CliError, CliResult};
use crate::traces::{read_trace_file, TraceFile};

#[derive(Args, Clone, Debug)]
pub struct PlotArgs {
    /// Trace CSVs from `solve` or runtime CSVs from `bench`.
    #[arg(required = true)]
    pub traces: Vec<PathBuf>,
    /// Output script.
    #[arg(long)]
    pub out: PathBuf,
}

struct Series {
    label: String,
    iter: Vec<usize>,
    grad_norm: Vec<f64>,
    time: Vec<f64>,
}

impl Series {
    fn style(&self) -> &'static str {
        if self
            .label
            .rsplit('/')
            .next()
            .is_some_and(|name| name.starts_with("osi"))
        {
            "--"
        } else {
            "-"
        }
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

fn load_series(paths: &[PathBuf]) -> CliResult<Vec<Series>> {
    let mut series = Vec::new();
    for path in paths {
        match read_trace_file(path)? {
            TraceFile::Trace(rows) => series.push(Series {
                label: stem(path),
                iter: rows.iter().map(|r| r.iter).collect(),
                grad_norm: rows.iter().map(|r| r.grad_norm).collect(),
                time: rows.iter().map(|r| r.elapsed).collect(),
            }),
            TraceFile::Runtime(rows) => {
                let mut order: Vec<String> = Vec::new();
                let mut by_algo: HashMap<String, Series> = HashMap::new();
                for r in rows {
                    let s = by_algo.entry(r.algorithm.clone()).or_insert_with(|| {
                        order.push(r.algorithm.clone());
                        Series {
                            label: r.algorithm.clone(),
                            iter: Vec::new(),
                            grad_norm: Vec::new(),
                            time: Vec::new(),
                        }
                    });
                    s.iter.push(r.iter);
                    s.grad_norm.push(r.grad_norm);
                    s.time.push(r.mean_elapsed_s);
                }
                let multi = paths.len() > 1;
                for name in order {
                    let mut s = by_algo.remove(&name).expect("inserted above");
                    if multi {
                        s.label = format!("{}/{}", stem(path), s.label);
                    }
                    series.push(s);
                }
            }
        }
    }
    Ok(series)
}

fn py_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else {
        "float(\"nan\")".into()
    }
}

fn py_list<T>(values: &[T], fmt: impl Fn(&T) -> String) -> String {
    let items: Vec<String> = values.iter().map(fmt).collect();
    format!("[{}]", items.join(", "))
}

fn py_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

pub fn render_script(paths: &[PathBuf], default_figure: &Path) -> CliResult<String> {
    let series = load_series(paths)?;
    let mut data = String::new();
    for s in &series {
        data.push_str(&format!(
            "    {{\"label\": {}, \"style\": {}, \"iter\": {}, \"grad_norm\": {}, \"time\": {}}},\n",
            py_str(&s.label),
            py_str(s.style()),
            py_list(&s.iter, |i| i.to_string()),
            py_list(&s.grad_norm, |v| py_float(*v)),
            py_list(&s.time, |v| py_float(*v)),
        ));
    }
    let sources: Vec<String> = paths
        .iter()
        .map(|p| format!("#   {}", p.display()))
        .collect();
    Ok(format!(
        r#"#!/usr/bin/env python3
# Convergence plot generated by `opscale plot` from:
{sources}
#
# Usage: python3 {script} [figure]
# Fixed-point forms are solid, Sinkhorn forms dashed. Runtimes are absolute
# seconds on the machine that produced the traces.
import sys

import matplotlib.pyplot as plt

DEFAULT_FIGURE = {figure}

SERIES = [
{data}]


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else DEFAULT_FIGURE
    fig, (by_iter, by_time) = plt.subplots(1, 2, figsize=(11, 4.2))
    for s in SERIES:
        by_iter.semilogy(s["iter"], s["grad_norm"], s["style"], label=s["label"])
        by_time.semilogy(s["time"], s["grad_norm"], s["style"])
    by_iter.set_xlabel("iteration")
    by_time.set_xlabel("runtime (s)")
    for ax in (by_iter, by_time):
        ax.set_ylabel("grad norm")
        ax.grid(True, which="major", alpha=0.3)
    by_iter.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(out, dpi=150)


if __name__ == "__main__":
    main()
"#,
        sources = sources.join("\n"),
        script = default_figure
            .with_extension("py")
            .file_name()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned()),
        figure = py_str(&default_figure.display().to_string()),
    ))
}

pub fn plot(args: PlotArgs) -> CliResult<()> {
    let figure = args.out.with_extension("png");
    let script = render_script(&args.traces, &figure)?;
    fs::write(&args.out, script).map_err(|e| CliError::file(&args.out, e))?;
    println!(
        "wrote {} (renders {})",
        args.out.display(),
        figure.display()
    );
    Ok(())
}
