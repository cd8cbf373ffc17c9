//! Labeled dense nonnegative matrices.
//!
//! Tables persist as CSV: the header row is `label` followed by the column
//! labels, every following row is a row label followed by its entries.

use std::collections::HashSet;
use std::io::{Read, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("table shape {rows}x{cols} does not match {n_row_labels} row labels and {n_col_labels} column labels")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        n_row_labels: usize,
        n_col_labels: usize,
    },
    #[error("negative or non-finite entry at ({row}, {col})")]
    InvalidEntry { row: usize, col: usize },
    #[error("duplicate {axis} label `{label}`")]
    DuplicateLabel { axis: &'static str, label: String },
    #[error("malformed table csv: {0}")]
    Csv(String),
}

/// Labeled nonnegative matrix of counts or weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ContingencyTable<T: Real> {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    counts: DMatrix<T>,
}

fn check_unique(labels: &[String], axis: &'static str) -> Result<(), TableError> {
    let mut seen = HashSet::with_capacity(labels.len());
    for label in labels {
        if !seen.insert(label.as_str()) {
            return Err(TableError::DuplicateLabel {
                axis,
                label: label.clone(),
            });
        }
    }
    Ok(())
}

impl<T: Real> ContingencyTable<T> {
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        counts: DMatrix<T>,
    ) -> Result<Self, TableError> {
        if counts.nrows() != row_labels.len() || counts.ncols() != col_labels.len() {
            return Err(TableError::ShapeMismatch {
                rows: counts.nrows(),
                cols: counts.ncols(),
                n_row_labels: row_labels.len(),
                n_col_labels: col_labels.len(),
            });
        }
        check_unique(&row_labels, "row")?;
        check_unique(&col_labels, "column")?;
        for j in 0..counts.ncols() {
            for i in 0..counts.nrows() {
                let v = counts[(i, j)];
                if !v.is_finite() || v < T::zero() {
                    return Err(TableError::InvalidEntry { row: i, col: j });
                }
            }
        }
        Ok(Self {
            row_labels,
            col_labels,
            counts,
        })
    }

    /// Builds a table with generated labels `r0..`, `c0..`.
    pub fn from_matrix(counts: DMatrix<T>) -> Result<Self, TableError> {
        let rows = (0..counts.nrows()).map(|i| format!("r{i}")).collect();
        let cols = (0..counts.ncols()).map(|j| format!("c{j}")).collect();
        Self::new(rows, cols, counts)
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, TableError> {
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(TableError::Csv("ragged rows".into()));
        }
        let m = DMatrix::from_fn(rows.len(), ncols, |i, j| T::lit(rows[i][j]));
        Self::from_matrix(m)
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn counts(&self) -> &DMatrix<T> {
        &self.counts
    }

    pub fn into_parts(self) -> (Vec<String>, Vec<String>, DMatrix<T>) {
        (self.row_labels, self.col_labels, self.counts)
    }

    pub fn nrows(&self) -> usize {
        self.counts.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.counts.ncols()
    }

    pub fn grand_total(&self) -> T {
        self.counts.iter().fold(T::zero(), |acc, &v| acc + v)
    }

    pub fn row_sums(&self) -> Vec<T> {
        self.counts
            .row_iter()
            .map(|r| r.iter().fold(T::zero(), |acc, &v| acc + v))
            .collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        self.counts
            .column_iter()
            .map(|c| c.iter().fold(T::zero(), |acc, &v| acc + v))
            .collect()
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.counts.row(i).iter().copied().collect()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.counts.column(j).iter().copied().collect()
    }

    pub fn transpose(&self) -> Self {
        Self {
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
            counts: self.counts.transpose(),
        }
    }

    /// Keeps only the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let counts = self.counts.select_rows(rows);
        Self {
            row_labels: rows.iter().map(|&i| self.row_labels[i].clone()).collect(),
            col_labels: self.col_labels.clone(),
            counts,
        }
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let counts = self.counts.select_columns(cols);
        Self {
            row_labels: self.row_labels.clone(),
            col_labels: cols.iter().map(|&j| self.col_labels[j].clone()).collect(),
            counts,
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), TableError> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = Vec::with_capacity(self.ncols() + 1);
        header.push("label".to_string());
        header.extend(self.col_labels.iter().cloned());
        w.write_record(&header)
            .map_err(|e| TableError::Csv(e.to_string()))?;
        for (i, label) in self.row_labels.iter().enumerate() {
            let mut rec = Vec::with_capacity(self.ncols() + 1);
            rec.push(label.clone());
            rec.extend(self.counts.row(i).iter().map(|v| v.as_f64().to_string()));
            w.write_record(&rec)
                .map_err(|e| TableError::Csv(e.to_string()))?;
        }
        w.flush().map_err(|e| TableError::Csv(e.to_string()))
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, TableError> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers().map_err(|e| TableError::Csv(e.to_string()))?;
        if header.get(0) != Some("label") {
            return Err(TableError::Csv("first header cell must be `label`".into()));
        }
        let col_labels: Vec<String> = header.iter().skip(1).map(String::from).collect();
        let mut row_labels = Vec::new();
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| TableError::Csv(e.to_string()))?;
            if rec.len() != col_labels.len() + 1 {
                return Err(TableError::Csv(format!(
                    "row `{}` has {} fields, expected {}",
                    rec.get(0).unwrap_or(""),
                    rec.len(),
                    col_labels.len() + 1
                )));
            }
            row_labels.push(rec[0].to_string());
            for cell in rec.iter().skip(1) {
                let v: f64 = cell
                    .trim()
                    .parse()
                    .map_err(|_| TableError::Csv(format!("bad number `{cell}`")))?;
                values.push(T::lit(v));
            }
        }
        let counts = DMatrix::from_row_slice(row_labels.len(), col_labels.len(), &values);
        Self::new(row_labels, col_labels, counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_entries() {
        let err = ContingencyTable::<f64>::from_rows(&[&[1.0, -1.0]]).unwrap_err();
        assert!(matches!(err, TableError::InvalidEntry { row: 0, col: 1 }));
    }

    #[test]
    fn rejects_duplicate_labels() {
        let m = DMatrix::<f64>::zeros(2, 1);
        let err =
            ContingencyTable::new(vec!["a".into(), "a".into()], vec!["x".into()], m).unwrap_err();
        assert!(matches!(err, TableError::DuplicateLabel { axis: "row", .. }));
    }

    #[test]
    fn csv_round_trip() {
        let t = ContingencyTable::<f64>::from_rows(&[&[1.0, 0.5], &[2.0, 0.0]]).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = ContingencyTable::<f64>::read_csv(buf.as_slice()).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn margins() {
        let t = ContingencyTable::<f64>::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert_eq!(t.row_sums(), vec![3.0, 7.0]);
        assert_eq!(t.col_sums(), vec![4.0, 6.0]);
        assert_eq!(t.grand_total(), 10.0);
    }
}
