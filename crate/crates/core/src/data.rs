//! Rectangular data containers: the numeric data matrix and the missingness
//! mask that together define an imputation problem.

use crate::error::{Error, Result};

/// An n-by-p numeric rectangle with named columns, stored row-major.
///
/// This is the unit of simulation, amputation, and imputation. Values are
/// plain `f64`; missingness is carried separately in a [`MissingMask`].
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    names: Vec<String>,
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    /// Builds a matrix from row-major values.
    pub fn from_row_major(names: Vec<String>, n_rows: usize, values: Vec<f64>) -> Result<Self> {
        let n_cols = names.len();
        if n_cols == 0 {
            return Err(Error::Domain("data matrix needs at least one column".into()));
        }
        if values.len() != n_rows * n_cols {
            return Err(Error::Domain(format!(
                "expected {} values for a {}x{} matrix, got {}",
                n_rows * n_cols,
                n_rows,
                n_cols,
                values.len()
            )));
        }
        Ok(Self {
            names,
            n_rows,
            n_cols,
            values,
        })
    }

    /// Builds a matrix from rows. All rows must have `names.len()` entries.
    pub fn from_rows(names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = names.len();
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::Domain(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    n_cols
                )));
            }
            values.extend_from_slice(row);
        }
        Self::from_row_major(names, rows.len(), values)
    }

    /// Replaces the column names, keeping the values.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_cols {
            return Err(Error::Domain(format!(
                "expected {} column names, got {}",
                self.n_cols,
                names.len()
            )));
        }
        self.names = names;
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, col: usize) -> &str {
        &self.names[col]
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.values[row * self.n_cols + col] = value;
    }

    /// Copies a column out as a vector.
    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.get(i, col)).collect()
    }

    /// Row-major view of all values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// An n-by-p boolean pattern marking which cells are to be imputed
/// (`true` = missing).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingMask {
    n_rows: usize,
    n_cols: usize,
    flags: Vec<bool>,
}

impl MissingMask {
    /// An all-observed mask.
    pub fn all_observed(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            flags: vec![false; n_rows * n_cols],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn is_missing(&self, row: usize, col: usize) -> bool {
        self.flags[row * self.n_cols + col]
    }

    #[inline]
    pub fn set_missing(&mut self, row: usize, col: usize, missing: bool) {
        self.flags[row * self.n_cols + col] = missing;
    }

    pub fn row_has_missing(&self, row: usize) -> bool {
        (0..self.n_cols).any(|j| self.is_missing(row, j))
    }

    /// Number of rows containing at least one missing cell.
    pub fn incomplete_row_count(&self) -> usize {
        (0..self.n_rows).filter(|&i| self.row_has_missing(i)).count()
    }

    pub fn missing_count_in_row(&self, row: usize) -> usize {
        (0..self.n_cols).filter(|&j| self.is_missing(row, j)).count()
    }

    pub fn missing_count_in_col(&self, col: usize) -> usize {
        (0..self.n_rows).filter(|&i| self.is_missing(i, col)).count()
    }

    pub fn observed_count_in_col(&self, col: usize) -> usize {
        self.n_rows - self.missing_count_in_col(col)
    }

    pub fn any_missing(&self) -> bool {
        self.flags.iter().any(|&f| f)
    }

    /// Columns that contain at least one missing cell, in column order.
    pub fn columns_with_missing(&self) -> Vec<usize> {
        (0..self.n_cols)
            .filter(|&j| self.missing_count_in_col(j) > 0)
            .collect()
    }

    /// Checks the structural mask invariants against a requested proportion
    /// of incomplete cases: the incomplete-row count is exact, no row is
    /// fully missing, and complete rows are all-observed by definition.
    pub fn validate(&self, p_incomplete: f64) -> Result<()> {
        let expected = (p_incomplete * self.n_rows as f64).round() as usize;
        let actual = self.incomplete_row_count();
        if actual != expected {
            return Err(Error::Domain(format!(
                "mask has {} incomplete rows, expected {}",
                actual, expected
            )));
        }
        for i in 0..self.n_rows {
            if self.missing_count_in_row(i) == self.n_cols {
                return Err(Error::Domain(format!("row {} is fully missing", i)));
            }
        }
        Ok(())
    }
}
