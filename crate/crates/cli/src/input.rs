// SPDX-License-Identifier: MIT OR Apache-2.0

//! Numeric CSV input: comma separated, optional header row, no missing cells.

use std::path::Path;

use anyhow::{bail, Context, Result};
use hdcp::model::PanelSeries;

/// Row-major numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl Table {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.values[i * self.cols + j]).collect()
    }
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok()
}

/// Reads a numeric table. A first row with any non-numeric cell is a header.
pub fn read_table(path: &Path) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut values = Vec::new();
    let (mut rows, mut cols) = (0usize, 0usize);
    for (n, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: malformed CSV", path.display()))?;
        let parsed: Option<Vec<f64>> = record.iter().map(parse_cell).collect();
        let Some(parsed) = parsed else {
            if n == 0 {
                continue;
            }
            bail!("{}: non-numeric or missing cell on line {}", path.display(), n + 1);
        };
        if rows == 0 {
            cols = parsed.len();
        }
        if parsed.is_empty() {
            bail!("{}: empty row on line {}", path.display(), n + 1);
        }
        if parsed.iter().any(|v| !v.is_finite()) {
            bail!("{}: non-finite value on line {}", path.display(), n + 1);
        }
        values.extend(parsed);
        rows += 1;
    }
    if rows == 0 {
        bail!("{}: no numeric rows", path.display());
    }
    Ok(Table { rows, cols, values })
}

/// Panel with rows as time points and columns as components, or the reverse
/// when `transpose` is set.
pub fn read_panel(path: &Path, transpose: bool) -> Result<PanelSeries> {
    let m = read_table(path)?;
    let components: Vec<Vec<f64>> =
        if transpose { (0..m.rows).map(|i| m.row(i).to_vec()).collect() } else { (0..m.cols).map(|j| m.column(j)).collect() };
    Ok(PanelSeries::from_rows(&components)?)
}

/// A single column (or single row) of numbers.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let m = read_table(path)?;
    if m.cols != 1 && m.rows != 1 {
        bail!("{}: expected a single column, found {} x {}", path.display(), m.rows, m.cols);
    }
    Ok(m.values)
}

/// Square matrix, row-major.
pub fn read_square(path: &Path) -> Result<(usize, Vec<f64>)> {
    let m = read_table(path)?;
    if m.rows != m.cols {
        bail!("{}: expected a square matrix, found {} x {}", path.display(), m.rows, m.cols);
    }
    Ok((m.rows, m.values))
}
