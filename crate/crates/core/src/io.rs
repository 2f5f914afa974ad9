//! Plain-text CSV for matrices and vectors: one row per line, comma separated
//! decimal reals, no header. Blank lines are ignored.
//!
//! Values are written with the shortest representation that parses back to the
//! same `f64`, so a write/read cycle is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numkernel::DenseMatrix;

fn parse_rows(text: &str, path: &Path) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col, field) in trimmed.split(',').enumerate() {
            let field = field.trim();
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("field {} is not a number: {field:?}", col + 1),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: format!("field {} is not finite", col + 1),
                });
            }
            row.push(value);
        }
        rows.push((line_no, row));
    }
    Ok(rows)
}

pub fn parse_matrix(text: &str, path: &Path) -> Result<DenseMatrix> {
    let rows = parse_rows(text, path)?;
    let Some((_, first)) = rows.first() else {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "empty matrix file".into(),
        });
    };
    let width = first.len();
    if let Some((line, row)) = rows.iter().find(|(_, r)| r.len() != width) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: *line,
            message: format!("ragged row: {} fields, expected {width}", row.len()),
        });
    }
    let data: Vec<f64> = rows.iter().flat_map(|(_, r)| r.iter().copied()).collect();
    DenseMatrix::new(rows.len(), width, data)
}

/// A vector is either a single column (one value per line) or a single row.
pub fn parse_vector(text: &str, path: &Path) -> Result<Vec<f64>> {
    let rows = parse_rows(text, path)?;
    match rows.as_slice() {
        [] => Ok(Vec::new()),
        [(_, only)] => Ok(only.clone()),
        _ => {
            if let Some((line, row)) = rows.iter().find(|(_, r)| r.len() != 1) {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: *line,
                    message: format!("vector file row has {} fields, expected 1", row.len()),
                });
            }
            Ok(rows.into_iter().map(|(_, r)| r[0]).collect())
        }
    }
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix(&text, path)
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_vector(&text, path)
}

pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn format_vector(x: &[f64]) -> String {
    let mut out = String::new();
    for v in x {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_matrix(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    write_text(path, &format_matrix(m))
}

pub fn write_vector(path: impl AsRef<Path>, x: &[f64]) -> Result<()> {
    write_text(path, &format_vector(x))
}
