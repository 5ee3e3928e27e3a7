//! Complete-data generation and MCAR amputation.
//!
//! Datasets are drawn from a zero-mean, unit-variance equicorrelated
//! multivariate normal, which keeps the regression truth available in closed
//! form. Missingness is then imposed completely at random on an exact number
//! of rows.

use crate::data::{DataMatrix, MissingMask};
use crate::error::{Error, Result};
use crate::numkit::{draw_mvn, RngStream, SquareMatrix};

/// Population model: `n_vars` jointly normal variables (the last one plays
/// the outcome role), pairwise correlation `rho`, zero means, unit variances.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSpec {
    pub n_vars: usize,
    pub rho: f64,
    pub n_cases: usize,
}

impl Default for PopulationSpec {
    fn default() -> Self {
        Self {
            n_vars: 4,
            rho: 0.5,
            n_cases: 200,
        }
    }
}

impl PopulationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_vars < 2 {
            return Err(Error::Config("n_vars must be at least 2".into()));
        }
        let lower = -1.0 / (self.n_vars as f64 - 1.0);
        if !(self.rho > lower && self.rho < 1.0) {
            return Err(Error::Config(format!(
                "rho must lie in ({lower}, 1) for {} variables, got {}",
                self.n_vars, self.rho
            )));
        }
        if self.n_cases == 0 {
            return Err(Error::Config("n_cases must be positive".into()));
        }
        Ok(())
    }

    /// The implied covariance matrix (equicorrelation, unit variances).
    pub fn covariance(&self) -> SquareMatrix {
        SquareMatrix::equicorrelation(self.n_vars, self.rho)
    }

    /// Column names: predictors `x1..x_{p-1}`, then the outcome `y`.
    pub fn column_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..self.n_vars).map(|i| format!("x{i}")).collect();
        names.push("y".into());
        names
    }
}

/// Closed-form population quantities implied by a [`PopulationSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrueParams {
    /// Population coefficients of regressing the outcome on the predictors.
    pub beta: Vec<f64>,
    /// Largest eigenvalue of the population covariance, `1 + (p-1) rho`.
    pub lambda1: f64,
}

/// Population regression coefficients `beta = Sigma_xx^{-1} sigma_xy` and the
/// leading eigenvalue of the population covariance.
pub fn true_theta(spec: &PopulationSpec) -> Result<TrueParams> {
    spec.validate()?;
    let n_pred = spec.n_vars - 1;
    let sigma_xx = SquareMatrix::equicorrelation(n_pred, spec.rho);
    let sigma_xy = vec![spec.rho; n_pred];
    let beta = if n_pred == 0 {
        Vec::new()
    } else {
        sigma_xx.solve_spd(&sigma_xy)?
    };
    Ok(TrueParams {
        beta,
        lambda1: 1.0 + (spec.n_vars as f64 - 1.0) * spec.rho,
    })
}

/// Draws a complete dataset of `spec.n_cases` rows from the population model.
pub fn simulate_dataset(rng: &mut RngStream, spec: &PopulationSpec) -> Result<DataMatrix> {
    spec.validate()?;
    let mean = vec![0.0; spec.n_vars];
    let data = draw_mvn(rng, &mean, &spec.covariance(), spec.n_cases)?;
    data.with_names(spec.column_names())
}

/// Generates an MCAR missingness pattern for an `n_rows` by `n_cols` dataset.
///
/// Exactly `round(p_incomplete * n_rows)` rows are selected without
/// replacement, independently of any data values (the function never sees
/// them). Within each selected row, cells go missing independently with
/// probability 1/2, redrawn until between 1 and `n_cols - 1` cells are
/// missing, so no row is fully missing and no selected row is fully observed.
pub fn ampute_mcar(
    rng: &mut RngStream,
    n_rows: usize,
    n_cols: usize,
    p_incomplete: f64,
) -> Result<MissingMask> {
    if !(0.0..1.0).contains(&p_incomplete) {
        return Err(Error::Domain(format!(
            "p_incomplete must lie in [0, 1), got {p_incomplete}"
        )));
    }
    if n_cols < 2 {
        return Err(Error::Domain(
            "amputation needs at least 2 columns so incomplete rows can keep one observed cell"
                .into(),
        ));
    }
    let mut mask = MissingMask::all_observed(n_rows, n_cols);
    let n_incomplete = (p_incomplete * n_rows as f64).round() as usize;
    if n_incomplete == 0 {
        return Ok(mask);
    }

    // partial Fisher-Yates: the first n_incomplete entries are a uniform
    // draw without replacement
    let mut indices: Vec<usize> = (0..n_rows).collect();
    for i in 0..n_incomplete {
        let j = i + rng.index(n_rows - i);
        indices.swap(i, j);
    }

    let mut pattern = vec![false; n_cols];
    for &row in &indices[..n_incomplete] {
        loop {
            let mut count = 0;
            for cell in pattern.iter_mut() {
                *cell = rng.coin();
                count += *cell as usize;
            }
            if (1..n_cols).contains(&count) {
                break;
            }
        }
        for (j, &miss) in pattern.iter().enumerate() {
            mask.set_missing(row, j, miss);
        }
    }
    Ok(mask)
}
