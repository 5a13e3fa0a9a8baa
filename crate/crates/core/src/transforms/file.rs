//! Plain-text matrix file format shared by the emitter and the comparator
//! loader.
//!
//! ```text
//! # comment lines start with '#'
//! name proposed
//! cost 22 0 0
//! 0.35355339059327373 ... (8 values)
//! ...                     (8 rows total)
//! ```
//!
//! Values are written with the shortest decimal that round-trips, so a
//! write/read cycle reproduces the matrix bit for bit.

use std::io::Write;
use std::path::Path;

use crate::matrix::Matrix8;
use crate::transforms::{ArithmeticCost, TransformError, TransformSpec};

/// Parsed contents of a matrix file.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFile {
    pub name: String,
    pub cost: ArithmeticCost,
    pub matrix: Matrix8,
}

fn parse_err(line: usize, message: impl Into<String>) -> TransformError {
    TransformError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses the matrix file format. Blank lines and `#` comments are
/// accepted anywhere; everything else must be the `name` line, the `cost`
/// line, and exactly eight rows of eight numbers, in that order.
pub fn parse_matrix_file(text: &str) -> Result<MatrixFile, TransformError> {
    let mut name: Option<String> = None;
    let mut cost: Option<ArithmeticCost> = None;
    let mut rows: Vec<[f64; 8]> = Vec::with_capacity(8);

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if name.is_none() {
            if fields.len() != 2 || fields[0] != "name" {
                return Err(parse_err(line_no, "expected `name <identifier>`"));
            }
            name = Some(fields[1].to_string());
            continue;
        }
        if cost.is_none() {
            if fields.len() != 4 || fields[0] != "cost" {
                return Err(parse_err(line_no, "expected `cost <adds> <mults> <shifts>`"));
            }
            let mut counts = [0u32; 3];
            for (slot, field) in counts.iter_mut().zip(&fields[1..]) {
                *slot = field
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad count {field:?}")))?;
            }
            cost = Some(ArithmeticCost::new(counts[0], counts[1], counts[2]));
            continue;
        }
        if rows.len() == 8 {
            return Err(parse_err(line_no, "more than 8 matrix rows"));
        }
        if fields.len() != 8 {
            return Err(parse_err(
                line_no,
                format!("expected 8 values in matrix row, got {}", fields.len()),
            ));
        }
        let mut row = [0.0f64; 8];
        for (col, field) in fields.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad number {field:?}")))?;
            if !v.is_finite() {
                return Err(TransformError::NonFinite {
                    row: rows.len(),
                    col,
                });
            }
            row[col] = v;
        }
        rows.push(row);
    }

    let name = name.ok_or_else(|| parse_err(0, "missing `name` line"))?;
    let cost = cost.ok_or_else(|| parse_err(0, "missing `cost` line"))?;
    if rows.len() != 8 {
        return Err(parse_err(
            0,
            format!("expected 8 matrix rows, got {}", rows.len()),
        ));
    }
    let mut m = [[0.0; 8]; 8];
    for (r, row) in rows.into_iter().enumerate() {
        m[r] = row;
    }
    Ok(MatrixFile {
        name,
        cost,
        matrix: Matrix8(m),
    })
}

/// Writes a matrix in the file format, full precision.
pub fn write_matrix_file(
    out: &mut dyn Write,
    name: &str,
    cost: ArithmeticCost,
    matrix: &Matrix8,
) -> std::io::Result<()> {
    writeln!(out, "name {name}")?;
    writeln!(
        out,
        "cost {} {} {}",
        cost.additions, cost.multiplications, cost.bit_shifts
    )?;
    for row in &matrix.0 {
        let mut first = true;
        for v in row {
            if !first {
                write!(out, " ")?;
            }
            write!(out, "{v}")?;
            first = false;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Loads an external transform from a matrix file. The file's matrix is
/// used directly for fidelity math; if it is ternary it also serves as the
/// integer kernel for cost audits, and the declared cost comes from the
/// file's `cost` header.
pub fn load_comparator(path: &Path) -> Result<TransformSpec, TransformError> {
    let text = std::fs::read_to_string(path)?;
    let parsed = parse_matrix_file(&text)?;
    TransformSpec::from_matrix(&parsed.name, parsed.matrix, parsed.cost)
}
