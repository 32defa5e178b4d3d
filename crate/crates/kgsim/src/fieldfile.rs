//! JSON snapshot files holding a real state `(u, u_t)` at time `t`.
//!
//! ```json
//! { "grid": { "box_period": 25.1, "plane_points": 16, "mode_cutoff": 2, "dealias_fraction": 1.0 },
//!   "t": 0.0, "u": [...], "udot": [...] }
//! ```
//!
//! Samples are physical values in storage order `(i1 * N + i2) * ny + iy`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::field::Field;
use crate::grid::{Grid, GridSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFile {
    pub grid: GridSpec,
    #[serde(default)]
    pub t: f64,
    pub u: Vec<f64>,
    pub udot: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("byte {offset}: {message}")]
pub struct FieldFileError {
    pub offset: usize,
    pub message: String,
}

/// Byte offset of 1-based `(line, column)` in `text`.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

impl FieldFile {
    pub fn parse(text: &str) -> Result<Self, FieldFileError> {
        let f: FieldFile = serde_json::from_str(text).map_err(|e| FieldFileError {
            offset: byte_offset(text, e.line(), e.column()),
            message: e.to_string(),
        })?;
        let locate = |key: &str| text.find(&format!("\"{key}\"")).unwrap_or(0);
        f.grid.validate().map_err(|e| FieldFileError { offset: locate("grid"), message: e.to_string() })?;
        let need = f.grid.total_points();
        for (key, v) in [("u", &f.u), ("udot", &f.udot)] {
            if v.len() != need {
                return Err(FieldFileError {
                    offset: locate(key),
                    message: format!("{key} has {} samples, grid needs {need}", v.len()),
                });
            }
            if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                return Err(FieldFileError { offset: locate(key), message: format!("{key}[{i}] is not finite") });
            }
        }
        Ok(f)
    }

    pub fn from_fields(t: f64, u: &Field, udot: &Field) -> Self {
        Self { grid: *u.grid().spec(), t, u: u.to_real(), udot: udot.to_real() }
    }

    pub fn to_fields(&self) -> Result<(Arc<Grid>, Field, Field), FieldFileError> {
        let wrap = |e: crate::grid::GridError| FieldFileError { offset: 0, message: e.to_string() };
        let grid = Grid::new(self.grid).map_err(wrap)?;
        let u = Field::from_real(&grid, &self.u).map_err(wrap)?;
        let udot = Field::from_real(&grid, &self.udot).map_err(wrap)?;
        Ok((grid, u, udot))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_point_at_the_error() {
        let text = "{\n  \"grid\": oops }";
        let e = FieldFile::parse(text).unwrap_err();
        assert_eq!(&text[e.offset..e.offset + 1], "o");
    }

    #[test]
    fn length_mismatch_points_at_key() {
        let text = r#"{"grid":{"box_period":6.0,"plane_points":4,"mode_cutoff":1,"dealias_fraction":1.0},"u":[1.0],"udot":[]}"#;
        let e = FieldFile::parse(text).unwrap_err();
        assert!(text[e.offset..].starts_with("\"u\""), "{e}");
    }
}
