//! CSV files: per-algorithm traces and benchmark runtime statistics.

use std::path::Path;

use opscale::TraceRow;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const TRACE_HEADER: [&str; 4] = ["iter", "grad_norm", "elapsed_s", "omega"];
pub const RUNTIME_HEADER: [&str; 5] = [
    "iter",
    "algorithm",
    "grad_norm",
    "mean_elapsed_s",
    "std_elapsed_s",
];

/// One line of the benchmark CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeRow {
    pub iter: usize,
    pub algorithm: String,
    pub grad_norm: f64,
    pub mean_elapsed_s: f64,
    pub std_elapsed_s: f64,
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::file(path, e))?;
    if rows.is_empty() {
        w.write_record(header)
            .map_err(|e| CliError::file(path, e))?;
    }
    for row in rows {
        w.serialize(row).map_err(|e| CliError::file(path, e))?;
    }
    w.flush().map_err(|e| CliError::file(path, e))
}

/// The parsed content of a CSV produced by `solve` or `bench`.
pub enum TraceFile {
    Trace(Vec<TraceRow>),
    Runtime(Vec<RuntimeRow>),
}

/// Reads a trace or runtime CSV, recognised by its header.
pub fn read_trace_file(path: &Path) -> CliResult<TraceFile> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::file(path, e))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| CliError::file(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    let file = if header == TRACE_HEADER {
        TraceFile::Trace(collect(path, &mut r)?)
    } else if header == RUNTIME_HEADER {
        TraceFile::Runtime(collect(path, &mut r)?)
    } else {
        return Err(CliError::file(
            path,
            format!(
                "malformed trace: header `{}` is neither `{}` nor `{}`",
                header.join(","),
                TRACE_HEADER.join(","),
                RUNTIME_HEADER.join(",")
            ),
        ));
    };
    Ok(file)
}

fn collect<T: for<'de> Deserialize<'de>>(
    path: &Path,
    r: &mut csv::Reader<std::fs::File>,
) -> CliResult<Vec<T>> {
    let rows = r
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CliError::file(path, format!("malformed trace: {e}")))?;
    if rows.is_empty() {
        return Err(CliError::file(path, "malformed trace: no data rows"));
    }
    Ok(rows)
}
