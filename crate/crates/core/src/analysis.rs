//! The scientific analysis (ordinary least squares on completed data) and
//! Rubin's rules for pooling the analyses of the m completed datasets.

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::numkit::{t_quantile, SquareMatrix};

/// Confidence level for pooled intervals.
pub const CONFIDENCE_LEVEL: f64 = 0.95;

/// Result of one completed-data regression: the scientific estimate (the
/// coefficient of the first predictor) and its sampling variance.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletedAnalysis {
    pub estimate: f64,
    pub variance: f64,
    pub n_obs: usize,
    pub n_params: usize,
}

/// OLS of the outcome (last column) on all other columns plus an intercept.
///
/// Returns the coefficient of the first column as the estimate `q` and
/// `u = s^2 [(X'X)^{-1}]_{11}` as its sampling variance, with
/// `s^2 = RSS / (n - q_params)`.
pub fn fit_ols(completed: &DataMatrix) -> Result<CompletedAnalysis> {
    let n = completed.n_rows();
    let p = completed.n_cols();
    if p < 2 {
        return Err(Error::Domain(
            "fit_ols needs an outcome column and at least one predictor".into(),
        ));
    }
    let q = p; // intercept + (p - 1) predictors
    if n <= q {
        return Err(Error::Domain(format!(
            "fit_ols needs more rows than parameters ({n} rows, {q} parameters)"
        )));
    }
    let outcome = p - 1;

    let mut xtx = SquareMatrix::zeros(q);
    let mut xty = vec![0.0; q];
    let mut x = Vec::with_capacity(q);
    for i in 0..n {
        x.clear();
        x.push(1.0);
        for j in 0..outcome {
            x.push(completed.get(i, j));
        }
        let yi = completed.get(i, outcome);
        for a in 0..q {
            xty[a] += x[a] * yi;
            for b in a..q {
                xtx.set(a, b, xtx.get(a, b) + x[a] * x[b]);
            }
        }
    }
    for a in 0..q {
        for b in (a + 1)..q {
            let v = xtx.get(a, b);
            xtx.set(b, a, v);
        }
    }

    let beta = xtx.solve_spd(&xty).map_err(|_| Error::SingularDesign)?;
    let inv = xtx.invert_spd().map_err(|_| Error::SingularDesign)?;

    let mut rss = 0.0;
    for i in 0..n {
        let mut fitted = beta[0];
        for j in 0..outcome {
            fitted += beta[j + 1] * completed.get(i, j);
        }
        let r = completed.get(i, outcome) - fitted;
        rss += r * r;
    }
    let s2 = rss / (n - q) as f64;

    Ok(CompletedAnalysis {
        estimate: beta[1],
        variance: s2 * inv.get(1, 1),
        n_obs: n,
        n_params: q,
    })
}

/// Rubin's-rules combination of m completed-data analyses.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledEstimate {
    /// Mean of the m estimates.
    pub qbar: f64,
    /// Within-imputation variance: mean of the m sampling variances.
    pub ubar: f64,
    /// Between-imputation variance of the estimates (divisor m - 1).
    pub b: f64,
    /// Total variance `ubar + (1 + 1/m) b`.
    pub t_var: f64,
    /// Barnard-Rubin adjusted degrees of freedom.
    pub df: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Pools m completed-data analyses.
///
/// Degrees of freedom follow the Barnard-Rubin small-sample adjustment:
/// `df_old = (m-1)(1 + 1/r)^2` with `r = (1+1/m) b / ubar`,
/// `df_obs = ((nu+1)/(nu+3)) nu (1-lambda)` with `nu = n - q_params` and
/// `lambda = (1+1/m) b / t_var`, combined as their harmonic-style product.
/// `b = 0` (all estimates identical) is not an error: the pooled df then
/// equals `df_obs`, and the interval is the complete-data one at that df.
pub fn pool_rubin(analyses: &[CompletedAnalysis]) -> Result<PooledEstimate> {
    let m = analyses.len();
    if m < 2 {
        return Err(Error::Domain("pool_rubin needs at least 2 analyses".into()));
    }
    let (n_obs, n_params) = (analyses[0].n_obs, analyses[0].n_params);
    if analyses
        .iter()
        .any(|a| a.n_obs != n_obs || a.n_params != n_params)
    {
        return Err(Error::Domain(
            "pool_rubin: analyses disagree on (n_obs, n_params)".into(),
        ));
    }
    let m_f = m as f64;
    // identical analyses pool to themselves exactly; the summed mean can be
    // off by an ulp, which would turn b = 0 into b = 1e-32
    let all_equal = analyses.iter().all(|a| a.estimate == analyses[0].estimate);
    let qbar = if all_equal {
        analyses[0].estimate
    } else {
        analyses.iter().map(|a| a.estimate).sum::<f64>() / m_f
    };
    let ubar = analyses.iter().map(|a| a.variance).sum::<f64>() / m_f;
    let b = if all_equal {
        0.0
    } else {
        analyses
            .iter()
            .map(|a| (a.estimate - qbar).powi(2))
            .sum::<f64>()
            / (m_f - 1.0)
    };
    let infl = 1.0 + 1.0 / m_f;
    let t_var = ubar + infl * b;

    let nu_com = (n_obs - n_params) as f64;
    let lambda = if t_var > 0.0 { infl * b / t_var } else { 0.0 };
    let df_obs = (nu_com + 1.0) / (nu_com + 3.0) * nu_com * (1.0 - lambda);
    let df = if b == 0.0 {
        df_obs
    } else if df_obs <= 0.0 {
        // ubar = 0: all information is between-imputation; fall back to the
        // large-sample formula
        let r = infl * b / ubar;
        (m_f - 1.0) * (1.0 + 1.0 / r).powi(2)
    } else {
        let r = infl * b / ubar;
        let df_old = (m_f - 1.0) * (1.0 + 1.0 / r).powi(2);
        df_old * df_obs / (df_old + df_obs)
    };

    let half = t_quantile(1.0 - (1.0 - CONFIDENCE_LEVEL) / 2.0, df)? * t_var.sqrt();
    Ok(PooledEstimate {
        qbar,
        ubar,
        b,
        t_var,
        df,
        ci_low: qbar - half,
        ci_high: qbar + half,
    })
}

/// How one repetition's pooled estimate fares against the truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepetitionOutcome {
    /// Signed estimation error `qbar - theta`.
    pub error: f64,
    /// Whether the confidence interval contains the truth.
    pub covered: bool,
    pub ci_width: f64,
}

pub fn evaluate_repetition(pooled: &PooledEstimate, theta_true: f64) -> RepetitionOutcome {
    RepetitionOutcome {
        error: pooled.qbar - theta_true,
        covered: pooled.ci_low <= theta_true && theta_true <= pooled.ci_high,
        ci_width: pooled.ci_high - pooled.ci_low,
    }
}
