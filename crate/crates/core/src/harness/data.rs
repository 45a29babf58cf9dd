//! Loading a unit-interval column from a CSV file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::Sample;

/// Cells treated as missing (after trimming whitespace).
pub const MISSING_TOKENS: [&str; 3] = ["", "?", "NA"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClipPolicy {
    /// Values outside [0, 1] are an error.
    #[default]
    Reject,
    /// Values outside [0, 1] are moved to the nearest endpoint.
    Clamp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadedColumn {
    pub sample: Sample,
    pub missing: usize,
    pub clamped: usize,
}

pub fn load_column(path: &Path, column: &str, policy: ClipPolicy) -> Result<LoadedColumn> {
    let input_err = |detail: String| Error::Input {
        path: path.display().to_string(),
        detail,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| input_err(e.to_string()))?;
    let headers = reader.headers().map_err(|e| input_err(e.to_string()))?.clone();
    let idx = headers
        .iter()
        .position(|h| h.trim() == column)
        .ok_or_else(|| input_err(format!("no column named '{column}'")))?;
    let mut values = Vec::new();
    let mut missing = 0;
    let mut clamped = 0;
    for (row, rec) in reader.records().enumerate() {
        // Row numbers count the header as line 1.
        let line = row + 2;
        let rec = rec.map_err(|e| input_err(e.to_string()))?;
        let cell = rec.get(idx).unwrap_or("").trim();
        if MISSING_TOKENS.contains(&cell) {
            missing += 1;
            continue;
        }
        let v: f64 = cell
            .parse()
            .map_err(|_| input_err(format!("row {line}: cannot parse '{cell}' as a number")))?;
        if !v.is_finite() {
            return Err(input_err(format!("row {line}: value {cell} is not finite")));
        }
        if !(0.0..=1.0).contains(&v) {
            match policy {
                ClipPolicy::Reject => {
                    return Err(input_err(format!("row {line}: value {v} is outside [0, 1]")));
                }
                ClipPolicy::Clamp => {
                    clamped += 1;
                    values.push(v.clamp(0.0, 1.0));
                    continue;
                }
            }
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(input_err(format!("column '{column}' has no usable values")));
    }
    Ok(LoadedColumn {
        sample: Sample::new(values)?,
        missing,
        clamped,
    })
}
