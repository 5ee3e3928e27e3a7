//! Non-convergence identifiers computed on chain traces: lag-k
//! autocorrelation and rank-normalized split R-hat, evaluated at arbitrary
//! checkpoint iterations using only the draws available up to each
//! checkpoint.

use crate::engine::{ChainTrace, MonitorKind};
use crate::error::{Error, Result};
use crate::numkit::{midranks, normal_quantile};

/// Default lag for the headline autocorrelation number.
pub const DEFAULT_AC_LAG: usize = 1;

/// A diagnostic value or the reason it is undefined. Undefined values
/// serialize as empty fields, never as numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiagnosticValue {
    Value(f64),
    /// Too few iterations at this checkpoint.
    Insufficient,
    /// Constant chains (zero variance); the statistic does not exist.
    Degenerate,
}

impl DiagnosticValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            DiagnosticValue::Value(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, DiagnosticValue::Value(_))
    }
}

/// Both identifiers for one statistic at one checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticResult {
    pub kind: MonitorKind,
    pub variable: Option<usize>,
    pub checkpoint: usize,
    pub ac: DiagnosticValue,
    pub rhat: DiagnosticValue,
}

/// Which R-hat estimator to use. The rank-normalized variant is the default;
/// the classic one operates on the raw draws and is kept for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RhatVariant {
    #[default]
    RankNormalized,
    Classic,
}

/// Reporting thresholds used to annotate output (values are flagged when
/// they exceed these); both are configurable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticThresholds {
    pub rhat: f64,
    pub autocorrelation: f64,
}

impl Default for DiagnosticThresholds {
    fn default() -> Self {
        Self {
            rhat: 1.01,
            autocorrelation: 0.1,
        }
    }
}

impl DiagnosticThresholds {
    pub fn flags_rhat(&self, v: f64) -> bool {
        v > self.rhat
    }

    pub fn flags_ac(&self, v: f64) -> bool {
        v > self.autocorrelation
    }
}

/// Lag-`lag` autocorrelation, averaged across chains.
///
/// Per chain, with the full-series mean and the full-series sum of squares in
/// the denominator:
/// `rho_k = sum_{s=1}^{t-k} (x_s - xbar)(x_{s+k} - xbar) / sum_{s=1}^{t} (x_s - xbar)^2`.
///
/// Needs `t >= lag + 2`; a constant chain makes the statistic undefined.
pub fn autocorrelation(chains: &[&[f64]], lag: usize) -> Result<DiagnosticValue> {
    if chains.is_empty() {
        return Err(Error::Domain("autocorrelation: no chains".into()));
    }
    if lag == 0 {
        return Err(Error::Domain("autocorrelation: lag must be >= 1".into()));
    }
    let t = chains[0].len();
    if chains.iter().any(|c| c.len() != t) {
        return Err(Error::Domain("autocorrelation: unequal chain lengths".into()));
    }
    if t < lag + 2 {
        return Err(Error::InsufficientDraws {
            needed: lag + 2,
            got: t,
        });
    }
    let mut sum = 0.0;
    for chain in chains {
        // constancy is a value property, not a round-off property: the mean
        // of identical values can differ from them by an ulp
        if chain.iter().all(|x| *x == chain[0]) {
            return Ok(DiagnosticValue::Degenerate);
        }
        let mean = chain.iter().sum::<f64>() / t as f64;
        let denom: f64 = chain.iter().map(|x| (x - mean).powi(2)).sum();
        if denom == 0.0 {
            return Ok(DiagnosticValue::Degenerate);
        }
        let numer: f64 = (0..t - lag)
            .map(|s| (chain[s] - mean) * (chain[s + lag] - mean))
            .sum();
        sum += numer / denom;
    }
    Ok(DiagnosticValue::Value(sum / chains.len() as f64))
}

/// Replaces each draw by the normal quantile of its pooled mid-rank:
/// `z = Phi^{-1}((r - 3/8) / (S + 1/4))` with `S` the total draw count.
/// Shape (chains x iterations) is preserved.
pub fn rank_normalize(chains: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
    let total: usize = chains.iter().map(|c| c.len()).sum();
    if total < 4 {
        return Err(Error::InsufficientDraws {
            needed: 4,
            got: total,
        });
    }
    let pooled: Vec<f64> = chains.iter().flat_map(|c| c.iter().copied()).collect();
    let ranks = midranks(&pooled);
    let s = total as f64;
    let mut z = ranks
        .iter()
        .map(|r| {
            normal_quantile((r - 0.375) / (s + 0.25))
                .expect("blom rank probabilities always lie in (0, 1)")
        })
        .collect::<Vec<f64>>()
        .into_iter();
    Ok(chains
        .iter()
        .map(|c| (0..c.len()).map(|_| z.next().unwrap()).collect())
        .collect())
}

/// Rank-normalized split R-hat across `m` chains of `t` iterations each.
pub fn rhat(chains: &[&[f64]]) -> Result<DiagnosticValue> {
    rhat_with(chains, RhatVariant::RankNormalized)
}

/// R-hat with an explicit estimator choice.
///
/// The draws (rank-normalized unless [`RhatVariant::Classic`]) are split into
/// `M = 2m` half-chains of length `N = floor(t/2)` (iteration 1 is dropped
/// first when `t` is odd). Then `B = N/(M-1) * sum (mean_m - mean)^2`, `W` is
/// the mean within-half variance, `var+ = (N-1)/N * W + B/N`, and the result
/// is `sqrt(var+ / W)`.
pub fn rhat_with(chains: &[&[f64]], variant: RhatVariant) -> Result<DiagnosticValue> {
    if chains.len() < 2 {
        return Err(Error::Domain("rhat: need at least 2 chains".into()));
    }
    let t = chains[0].len();
    if chains.iter().any(|c| c.len() != t) {
        return Err(Error::Domain("rhat: unequal chain lengths".into()));
    }
    if t < 4 {
        return Err(Error::InsufficientDraws { needed: 4, got: t });
    }

    let normalized: Vec<Vec<f64>>;
    let working: Vec<&[f64]> = match variant {
        RhatVariant::RankNormalized => {
            normalized = rank_normalize(chains)?;
            normalized.iter().map(|c| c.as_slice()).collect()
        }
        RhatVariant::Classic => chains.to_vec(),
    };

    let n = t / 2;
    let skip = t - 2 * n; // drop iteration 1 when t is odd
    let mut halves: Vec<&[f64]> = Vec::with_capacity(2 * working.len());
    for chain in &working {
        let trimmed = &chain[skip..];
        halves.push(&trimmed[..n]);
        halves.push(&trimmed[n..]);
    }

    let m_half = halves.len() as f64;
    let n_f = n as f64;
    let means: Vec<f64> = halves
        .iter()
        .map(|h| h.iter().sum::<f64>() / n_f)
        .collect();
    let grand = means.iter().sum::<f64>() / m_half;
    let b = n_f / (m_half - 1.0)
        * means.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
    let w = halves
        .iter()
        .zip(&means)
        .map(|(h, m)| h.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n_f - 1.0))
        .sum::<f64>()
        / m_half;
    if w == 0.0 {
        return Ok(DiagnosticValue::Degenerate);
    }
    let var_plus = (n_f - 1.0) / n_f * w + b / n_f;
    Ok(DiagnosticValue::Value((var_plus / w).sqrt()))
}

/// Evaluates both identifiers for one monitored statistic at each checkpoint,
/// using only iterations `1..=t` — exactly the information that would exist
/// had the algorithm been stopped there. Missing prerequisites become
/// markers; this never aborts the batch.
pub fn diagnose(
    trace: &ChainTrace,
    kind: MonitorKind,
    variable: Option<usize>,
    lag: usize,
    checkpoints: &[usize],
) -> Result<Vec<DiagnosticResult>> {
    if checkpoints.iter().any(|&t| t < 1 || t > trace.t_max()) {
        return Err(Error::Domain(format!(
            "checkpoints must lie in 1..={}",
            trace.t_max()
        )));
    }
    let series = trace.series(kind, variable);
    let mut out = Vec::with_capacity(checkpoints.len());
    for &t in checkpoints {
        let truncated: Vec<&[f64]> = series.iter().map(|c| &c[..t]).collect();
        let ac = if t < lag + 2 {
            DiagnosticValue::Insufficient
        } else {
            autocorrelation(&truncated, lag)?
        };
        let rh = if t < 4 {
            DiagnosticValue::Insufficient
        } else {
            rhat(&truncated)?
        };
        out.push(DiagnosticResult {
            kind,
            variable,
            checkpoint: t,
            ac,
            rhat: rh,
        });
    }
    Ok(out)
}
