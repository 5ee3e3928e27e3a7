//! Dense square-matrix kernels: Cholesky factorization, SPD solves, and the
//! power-iteration dominant eigenvalue used as a convergence monitor.
//!
//! Only the symmetric positive-(semi)definite cases needed by the rest of the
//! crate are implemented; there is deliberately no general eigensolver.

use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// A dense square matrix, row-major. Symmetric variants are symmetric exactly
/// as stored (entry (i,j) is bit-identical to entry (j,i)).
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Unit-variance equicorrelation matrix: 1 on the diagonal, `rho` off it.
    pub fn equicorrelation(dim: usize, rho: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, if i == j { 1.0 } else { rho });
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Domain("matrix must have dimension >= 1".into()));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::Domain("matrix rows must all have length dim".into()));
            }
            entries.extend_from_slice(row);
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.dim + j] = v;
    }

    /// Exact (stored-representation) symmetry check.
    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![0.0; self.dim];
        for i in 0..self.dim {
            let row = &self.entries[i * self.dim..(i + 1) * self.dim];
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Lower-triangular Cholesky factor `L` with `L * L^T == self`.
    ///
    /// Fails with [`Error::NotPositiveDefinite`] on the first non-positive
    /// pivot; the caller decides whether to ridge and retry.
    pub fn cholesky(&self) -> Result<SquareMatrix> {
        if !self.is_symmetric() {
            return Err(Error::Domain("cholesky requires a symmetric matrix".into()));
        }
        let n = self.dim;
        let mut l = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self.get(i, j);
                for k in 0..j {
                    sum -= l.get(i, k) * l.get(j, k);
                }
                if i == j {
                    if sum <= 0.0 {
                        return Err(Error::NotPositiveDefinite { index: i, pivot: sum });
                    }
                    l.set(i, j, sum.sqrt());
                } else {
                    l.set(i, j, sum / l.get(j, j));
                }
            }
        }
        Ok(l)
    }

    /// Solves `self * x = b` for symmetric positive-definite `self` via
    /// Cholesky factorization and forward/back substitution.
    pub fn solve_spd(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.dim {
            return Err(Error::Domain(format!(
                "solve_spd: vector length {} does not match dimension {}",
                b.len(),
                self.dim
            )));
        }
        let l = self.cholesky()?;
        Ok(l.solve_cholesky(b))
    }

    /// Solves `L L^T x = b` given that `self` is already a lower-triangular
    /// Cholesky factor.
    fn solve_cholesky(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        // forward: L y = b
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut sum = b[i];
            for k in 0..i {
                sum -= self.get(i, k) * y[k];
            }
            y[i] = sum / self.get(i, i);
        }
        // backward: L^T x = y
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in (i + 1)..n {
                sum -= self.get(k, i) * x[k];
            }
            x[i] = sum / self.get(i, i);
        }
        x
    }

    /// Inverse of a symmetric positive-definite matrix, symmetric exactly as
    /// stored.
    pub fn invert_spd(&self) -> Result<SquareMatrix> {
        let n = self.dim;
        let l = self.cholesky()?;
        let mut inv = SquareMatrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = l.solve_cholesky(&e);
            e[j] = 0.0;
            for i in 0..n {
                inv.set(i, j, col[i]);
            }
        }
        // enforce bitwise symmetry against substitution round-off
        for i in 0..n {
            for j in (i + 1)..n {
                let s = 0.5 * (inv.get(i, j) + inv.get(j, i));
                inv.set(i, j, s);
                inv.set(j, i, s);
            }
        }
        Ok(inv)
    }

    /// Largest eigenvalue of a symmetric positive-semidefinite matrix by
    /// power iteration with normalized iterates and Rayleigh-quotient
    /// estimates.
    ///
    /// The iteration runs from a deterministic probe sequence — all-ones, a
    /// fixed ramp perturbation, then every basis vector — and returns the
    /// largest converged Rayleigh quotient. A single start can converge to a
    /// non-dominant eigenvalue when it is exactly orthogonal to the dominant
    /// eigenspace (the all-ones vector is an eigenvector of many structured
    /// matrices); no nonzero eigenspace is orthogonal to the whole basis, so
    /// the sweep always sees the dominant one. `max_iter` is the total
    /// iteration budget across probes. A zero matrix resolves to 0.
    pub fn leading_eigenvalue(&self, tol: f64, max_iter: usize) -> Result<f64> {
        if !self.is_symmetric() {
            return Err(Error::Domain(
                "leading_eigenvalue requires a symmetric matrix".into(),
            ));
        }
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::Domain("tolerance must be positive".into()));
        }
        let n = self.dim;

        let mut probes: Vec<Vec<f64>> = Vec::with_capacity(n + 2);
        probes.push(vec![1.0; n]);
        probes.push((0..n).map(|i| 1.0 + 0.5 * (i as f64 + 1.0)).collect());
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            probes.push(e);
        }

        let mut best: Option<f64> = None;
        let mut budget = max_iter;
        for probe in &probes {
            let mut v = normalized(probe);
            let mut prev = f64::INFINITY;
            loop {
                if budget == 0 {
                    return Err(Error::NoConvergence {
                        max_iter,
                        last_estimate: best.unwrap_or(if prev.is_finite() { prev } else { 0.0 }),
                    });
                }
                budget -= 1;
                let w = self.matvec(&v);
                let rayleigh: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
                let norm = l2_norm(&w);
                if norm == 0.0 {
                    // this probe is annihilated; it contributes nothing
                    break;
                }
                if (rayleigh - prev).abs() <= tol * rayleigh.abs().max(f64::MIN_POSITIVE) {
                    best = Some(best.map_or(rayleigh, |b: f64| b.max(rayleigh)));
                    break;
                }
                prev = rayleigh;
                v = w.iter().map(|x| x / norm).collect();
            }
        }
        Ok(best.unwrap_or(0.0))
    }
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let n = l2_norm(v);
    v.iter().map(|x| x / n).collect()
}

/// Unbiased sample covariance (divisor n-1) of a complete data matrix,
/// symmetric exactly as stored.
pub fn covariance_matrix(data: &DataMatrix) -> Result<SquareMatrix> {
    let n = data.n_rows();
    let p = data.n_cols();
    if n < 2 {
        return Err(Error::TooFewRows(n));
    }
    let mut means = vec![0.0; p];
    for j in 0..p {
        let mut s = 0.0;
        for i in 0..n {
            s += data.get(i, j);
        }
        means[j] = s / n as f64;
    }
    let mut cov = SquareMatrix::zeros(p);
    for j in 0..p {
        for k in j..p {
            let mut s = 0.0;
            for i in 0..n {
                s += (data.get(i, j) - means[j]) * (data.get(i, k) - means[k]);
            }
            let c = s / (n as f64 - 1.0);
            cov.set(j, k, c);
            cov.set(k, j, c);
        }
    }
    Ok(cov)
}
