//! Design matrices, column standardization and subset Gram matrices.
//!
//! Rows are observations and columns are variables. Column indices are
//! zero-based throughout the crate.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use nalgebra::{DMatrix, DVector, DVectorView};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;

/// Relative tolerance on `‖x_j‖² = n` for a design flagged as standardized.
pub const STANDARDIZED_TOL: f64 = 1e-8;

/// An `n × p` real design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    data: DMatrix<f64>,
    standardized: bool,
}

impl DesignMatrix {
    /// Wraps a matrix, rejecting empty shapes and non-finite entries.
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::EmptyInput);
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            let (row, col) = (pos % data.nrows(), pos / data.nrows());
            return Err(Error::Domain(format!(
                "non-finite entry at row {row}, column {col}"
            )));
        }
        Ok(Self {
            data,
            standardized: false,
        })
    }

    /// Builds a design from row vectors.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if n == 0 || p == 0 {
            return Err(Error::EmptyInput);
        }
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::Dimension(format!(
                "row {i} has {} entries, expected {p}",
                rows[i].len()
            )));
        }
        Self::new(DMatrix::from_fn(n, p, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn p(&self) -> usize {
        self.data.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn column(&self, j: usize) -> DVectorView<'_, f64> {
        self.data.column(j)
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn column_norm_sq(&self, j: usize) -> f64 {
        self.data.column(j).norm_squared()
    }

    pub fn column_norms_sq(&self) -> Vec<f64> {
        (0..self.p()).map(|j| self.column_norm_sq(j)).collect()
    }

    /// Flags the design as standardized after checking `‖x_j‖² = n` to
    /// [`STANDARDIZED_TOL`] relative tolerance on every column.
    pub fn mark_standardized(mut self) -> Result<Self> {
        let n = self.n() as f64;
        for j in 0..self.p() {
            let norm_sq = self.column_norm_sq(j);
            if (norm_sq - n).abs() > STANDARDIZED_TOL * n {
                return Err(Error::Precondition(format!(
                    "column {j} has squared norm {norm_sq}, expected {n}"
                )));
            }
        }
        self.standardized = true;
        Ok(self)
    }

    /// Scales every column by `√n / ‖x_j‖` so that `‖x_j‖² = n`.
    ///
    /// No centering is performed; the regression model has no intercept.
    pub fn standardize_columns(&self) -> Result<Self> {
        let n = self.n() as f64;
        let mut data = self.data.clone();
        for (j, mut col) in data.column_iter_mut().enumerate() {
            let norm = col.norm();
            if norm == 0.0 {
                return Err(Error::DegenerateColumn(j));
            }
            col *= n.sqrt() / norm;
        }
        Ok(Self {
            data,
            standardized: true,
        })
    }

    /// `Σ_A = X_A' X_A / n` for the given column indices.
    ///
    /// Indices must be distinct and below `p`; they are stored in increasing
    /// order and the matrix rows/columns follow that order.
    pub fn subset_gram(&self, indices: &[usize]) -> Result<SubsetGram> {
        let idx = self.checked_indices(indices)?;
        let n = self.n() as f64;
        let k = idx.len();
        let mut matrix = DMatrix::zeros(k, k);
        for a in 0..k {
            for b in a..k {
                let v = self.data.column(idx[a]).dot(&self.data.column(idx[b])) / n;
                matrix[(a, b)] = v;
                matrix[(b, a)] = v;
            }
        }
        linalg::symmetrize(&mut matrix);
        Ok(SubsetGram {
            indices: idx,
            matrix,
        })
    }

    /// The full `p × p` Gram matrix `X'X / n`, symmetrized.
    pub fn gram(&self) -> DMatrix<f64> {
        let mut g = self.data.tr_mul(&self.data) / self.n() as f64;
        linalg::symmetrize(&mut g);
        g
    }

    /// `X b`.
    pub fn mul_vec(&self, b: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(self.n());
        for (j, &bj) in b.iter().enumerate() {
            if bj != 0.0 {
                out.axpy(bj, &self.data.column(j), 1.0);
            }
        }
        out
    }

    /// `X' r`.
    pub fn tr_mul_vec(&self, r: &DVector<f64>) -> DVector<f64> {
        self.data.tr_mul(r)
    }

    pub(crate) fn checked_indices(&self, indices: &[usize]) -> Result<Vec<usize>> {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        if let Some(&j) = idx.iter().find(|&&j| j >= self.p()) {
            return Err(Error::Index(format!(
                "column index {j} out of range for p = {}",
                self.p()
            )));
        }
        if let Some(w) = idx.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Index(format!("duplicate column index {}", w[0])));
        }
        Ok(idx)
    }
}

/// `Σ_A` together with the (increasing) index set `A` it was built from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetGram {
    pub indices: Vec<usize>,
    #[serde(skip)]
    pub matrix: DMatrix<f64>,
}

impl SubsetGram {
    /// Eigenvalues in increasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::sym_eigenvalues(&self.matrix)
    }

    /// `(λ_min, λ_max)`; `(0, 0)` for an empty index set.
    pub fn extremes(&self) -> (f64, f64) {
        linalg::sym_extremes(&self.matrix)
    }
}

/// Reads a rectangular numeric CSV into a design matrix.
pub fn load_design(path: impl AsRef<Path>, has_header: bool) -> Result<DesignMatrix> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    parse_design(&text, has_header)
}

/// Parses CSV text (rows are observations) into a design matrix.
pub fn parse_design(text: &str, has_header: bool) -> Result<DesignMatrix> {
    let rows = parse_rows(text, has_header)?;
    DesignMatrix::from_rows(&rows)
}

/// Reads a single-column CSV as a response vector.
pub fn load_vector(path: impl AsRef<Path>, has_header: bool) -> Result<Vec<f64>> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    parse_vector(&text, has_header)
}

pub fn parse_vector(text: &str, has_header: bool) -> Result<Vec<f64>> {
    let rows = parse_rows(text, has_header)?;
    if rows[0].len() != 1 {
        return Err(Error::Dimension(format!(
            "expected a single column, found {}",
            rows[0].len()
        )));
    }
    Ok(rows.into_iter().map(|r| r[0]).collect())
}

fn parse_rows(text: &str, has_header: bool) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = |rec: &csv::StringRecord| rec.position().map_or(i + 1, |p| p.line() as usize);
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(i + 1, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if let Some(first) = rows.first() {
            if record.len() != first.len() {
                return Err(Error::Parse {
                    line: line(&record),
                    message: format!("expected {} fields, found {}", first.len(), record.len()),
                });
            }
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(column, cell)| {
                cell.parse::<f64>().map_err(|_| Error::ParseCell {
                    row: line(&record),
                    column: column + 1,
                    value: cell.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(rows)
}
