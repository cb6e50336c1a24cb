//! Dataset CSV and sidecar files, JSON helpers, run configuration and the
//! report documents written by the command-line tool.

mod config;
mod reports;

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::distributions::Provenance;
use crate::error::{Error, Result};
use crate::model::SampleSet;

pub use config::{BruteForceGrid, DesignKind, RunConfig, VerifyPlan};
pub use reports::{CheckGroup, DesignSummary, EvalReport, VerifyReport};

/// Shortest decimal that parses back to the same `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Writes `x1,...,xn` and one row per point (LF line endings).
pub fn write_dataset(path: &Path, s: &SampleSet) -> Result<()> {
    let io_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        other => Error::Format {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(io_err)?;
    w.write_record((1..=s.dim()).map(|i| format!("x{i}"))).map_err(io_err)?;
    for p in s.points() {
        w.write_record(p.iter().map(|&v| format_f64(v))).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a dataset CSV whose header is exactly `x1,...,xn`. Non-finite values
/// are rejected with their line number.
pub fn read_dataset(path: &Path, r: f64) -> Result<SampleSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "missing header row x1,...,xn".into(),
        });
    }
    for (i, col) in header.iter().enumerate() {
        let want = format!("x{}", i + 1);
        if col != want {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: format!("unexpected column {} `{col}` (expected `{want}`)", i + 1),
            });
        }
    }
    let n = header.len();
    let mut coords = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != n {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected {n} fields, found {}", rec.len()),
            });
        }
        for (j, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("column x{}: `{field}` is not a number", j + 1),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("column x{}: non-finite value `{field}`", j + 1),
                });
            }
            coords.push(v);
        }
    }
    if coords.is_empty() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "no data rows".into(),
        });
    }
    SampleSet::from_flat(
        n,
        coords,
        r,
        Provenance::File {
            path: path.to_path_buf(),
        },
    )
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("expected {expected_len} fields, found {len}"),
        },
        other => Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("{other:?}"),
        },
    }
}

/// Provenance record stored next to a dataset as `<name>.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub provenance: Provenance,
    pub seed: u64,
    pub smoothing_seed: u64,
    pub r: f64,
    pub sigma: f64,
    pub m: usize,
    pub n: usize,
}

pub fn sidecar_path(dataset: &Path) -> PathBuf {
    dataset.with_extension("json")
}

/// Reads a dataset and, when present, its sidecar, whose radius and
/// provenance take precedence over `default_r`.
pub fn load_dataset(path: &Path, default_r: f64) -> Result<(SampleSet, Option<Sidecar>)> {
    let side_path = sidecar_path(path);
    let sidecar: Option<Sidecar> = if side_path.exists() {
        Some(read_json(&side_path)?)
    } else {
        None
    };
    let r = sidecar.as_ref().map_or(default_r, |s| s.r);
    let mut s = read_dataset(path, r)?;
    if let Some(side) = &sidecar {
        if side.n != s.dim() || side.m != s.len() {
            return Err(Error::Format {
                path: side_path,
                message: format!(
                    "sidecar describes {}x{} but the dataset is {}x{}",
                    side.m,
                    side.n,
                    s.len(),
                    s.dim()
                ),
            });
        }
        s = s.with_provenance(side.provenance.clone());
    }
    Ok((s, sidecar))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line() as u64,
        message: e.to_string(),
    })
}

/// Writes rows under a header with shortest round-trip float formatting.
pub fn write_table(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let io_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        other => Error::Format {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(io_err)?;
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
