//! JSON problem files.
//!
//! ```text
//! {"m": 5, "n": 5, "k": 7,
//!  "matrices": [[25 row-major numbers], ...],
//!  "meta": {"family": "hilbert", "seed": "42", "spec": {...}}}
//! ```
//!
//! Numbers are written in shortest round-trip form and parsed with correct
//! rounding, so a save/load cycle is bit-exact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cp_map::ScalingProblem;
use crate::error::{Error, FormatError, Result};
use crate::linalg::DenseMatrix;

/// Provenance recorded next to the matrices.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProblemMeta {
    pub family: String,
    pub seed: String,
    #[serde(default)]
    pub spec: serde_json::Value,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawProblem {
    m: usize,
    n: usize,
    k: usize,
    matrices: Vec<Vec<f64>>,
    #[serde(default)]
    meta: ProblemMeta,
}

/// A loaded file: the validated problem and its metadata.
#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub problem: ScalingProblem,
    pub meta: ProblemMeta,
}

pub fn save_problem(p: &ScalingProblem, meta: &ProblemMeta, path: impl AsRef<Path>) -> Result<()> {
    let raw = RawProblem {
        m: p.m(),
        n: p.n(),
        k: p.k(),
        matrices: p.matrices().iter().map(DenseMatrix::to_row_major).collect(),
        meta: meta.clone(),
    };
    let text = serde_json::to_string(&raw).map_err(|e| Error::Io(e.into()))?;
    fs::write(path, text)?;
    Ok(())
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<ScalingProblem> {
    Ok(load_problem_file(path)?.problem)
}

pub fn load_problem_file(path: impl AsRef<Path>) -> Result<ProblemFile> {
    let text = fs::read_to_string(path)?;
    parse_problem(&text)
}

fn field(field: impl Into<String>, message: impl Into<String>) -> Error {
    FormatError::Field {
        field: field.into(),
        message: message.into(),
    }
    .into()
}

pub(crate) fn parse_problem(text: &str) -> Result<ProblemFile> {
    let raw: RawProblem = serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    for (name, v) in [("m", raw.m), ("n", raw.n), ("k", raw.k)] {
        if v == 0 {
            return Err(field(name, "must be at least 1"));
        }
    }
    if raw.matrices.len() != raw.k {
        return Err(field(
            "matrices",
            format!("found {} matrices but k = {}", raw.matrices.len(), raw.k),
        ));
    }
    let mut matrices = Vec::with_capacity(raw.k);
    for (i, data) in raw.matrices.into_iter().enumerate() {
        let len = data.len();
        let a = DenseMatrix::from_row_major(raw.m, raw.n, data).map_err(|_| {
            field(
                format!("matrices[{i}]"),
                format!("{len} entries, expected m*n = {}", raw.m * raw.n),
            )
        })?;
        matrices.push(a);
    }
    let problem = ScalingProblem::new(matrices).map_err(|e| match e {
        Error::DegenerateProblem(msg) => Error::Format(FormatError::Degenerate(msg)),
        other => other,
    })?;
    Ok(ProblemFile {
        problem,
        meta: raw.meta,
    })
}
