//! Atomic file output and the CSV/JSON formats.
//!
//! CSV files have a header row, `,` separators, `.` decimals and shortest
//! round-trip float formatting. Absent values are empty fields;
//! non-finite values are written as `NaN`, `inf` or `-inf`.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{HarnessError, Result};

pub const TRACE_HEADER: &str = "iter,f_value,rel_dist,subgrad_norm,step_length";
pub const GRID_HEADER: &str = "x1,x2,f_p,grad_norm";

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| HarnessError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| HarnessError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| HarnessError::io(path, e))?;
    tmp.persist(path).map_err(|e| HarnessError::io(path, e.error))?;
    Ok(())
}

/// Files produced by one command, written together at the end. If any write
/// fails, files already written by the batch are removed.
#[derive(Debug, Default)]
pub struct OutputBatch {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl OutputBatch {
    pub fn add(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.files.push((path, bytes));
    }

    pub fn commit(self) -> Result<Vec<PathBuf>> {
        let mut written = Vec::with_capacity(self.files.len());
        for (path, bytes) in self.files {
            if let Err(e) = write_atomic(&path, &bytes) {
                for p in &written {
                    let _ = std::fs::remove_file(p);
                }
                return Err(e);
            }
            written.push(path);
        }
        Ok(written)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("summaries serialize to JSON");
    out.push(b'\n');
    out
}

/// Shortest round-trip form; exponent notation for very small or large values.
pub fn csv_field(v: f64) -> String {
    format!("{v:?}")
}

pub fn csv_optional(v: Option<f64>) -> String {
    v.map(csv_field).unwrap_or_default()
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

/// Parses one vector per non-empty line; entries separated by commas or
/// whitespace, `#` starts a comment.
pub fn parse_vectors(path: &Path, text: &str) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::parse::<f64>).collect();
        let row = row.map_err(|e| HarnessError::format(path, format!("line {}: {e}", n + 1)))?;
        out.push(row);
    }
    Ok(out)
}
