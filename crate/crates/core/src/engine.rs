//! The chained-equations imputation engine.
//!
//! Missing cells are initialized by resampling observed values, then updated
//! by cycling through the columns with a Bayesian normal-linear draw for
//! `t_max` iterations across `m` independent chains. After every full sweep
//! the monitored statistics are evaluated on the completed data and appended
//! to a trace.
//!
//! Randomness is addressed per (chain, iteration): sweep `t` of chain `c`
//! draws from the stream `(repetition, condition, c, Sweep(t))`. Because no
//! draw depends on `t_max`, a long run restricted to its first `t`
//! iterations is bit-identical to a run stopped at `t` — early stopping is a
//! checkpoint, not a different experiment.

use crate::analysis;
use crate::data::{DataMatrix, MissingMask};
use crate::error::{Error, Result};
use crate::numkit::matrix::{covariance_matrix, SquareMatrix};
use crate::numkit::rng::{Purpose, RngStream};
use crate::numkit::{EIGEN_MAX_ITER, EIGEN_TOL};

/// Ridge factor applied to the diagonal of X'X before factorization.
/// Small enough to leave well-conditioned fits untouched (relative effect on
/// the coefficients below 1e-3), large enough to survive near-collinearity.
pub const RIDGE: f64 = 1e-5;

/// State of one chain: the completed data (observed cells fixed, missing
/// cells holding the current imputations), its mask, and where in the
/// schedule it stands.
#[derive(Debug, Clone, PartialEq)]
pub struct ImputationState {
    completed: DataMatrix,
    mask: MissingMask,
    iteration: usize,
    chain_id: usize,
}

impl ImputationState {
    pub fn completed(&self) -> &DataMatrix {
        &self.completed
    }

    pub fn mask(&self) -> &MissingMask {
        &self.mask
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn chain_id(&self) -> usize {
        self.chain_id
    }
}

/// A statistic evaluated on the completed data after each sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonitorKind {
    /// Mean of the imputed cells, per variable with missing cells.
    ImputedMean,
    /// Variance of the imputed cells, per variable with missing cells.
    ImputedVar,
    /// Coefficient of the first predictor from the scientific regression.
    ThetaHat,
    /// Leading eigenvalue of the completed-data covariance matrix.
    Lambda1,
}

impl MonitorKind {
    pub const ALL: [MonitorKind; 4] = [
        MonitorKind::ImputedMean,
        MonitorKind::ImputedVar,
        MonitorKind::ThetaHat,
        MonitorKind::Lambda1,
    ];

    /// Stable label used in serialized traces.
    pub fn label(self) -> &'static str {
        match self {
            MonitorKind::ImputedMean => "imp_mean",
            MonitorKind::ImputedVar => "imp_var",
            MonitorKind::ThetaHat => "theta_hat",
            MonitorKind::Lambda1 => "lambda1",
        }
    }
}

/// One monitored value: (chain, iteration, statistic, variable) -> value.
/// `variable` is `None` for scalar statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub chain: usize,
    pub iteration: usize,
    pub kind: MonitorKind,
    pub variable: Option<usize>,
    pub value: f64,
}

/// Per-chain, per-iteration record of every monitored statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrace {
    n_chains: usize,
    t_max: usize,
    entries: Vec<TraceEntry>,
}

impl ChainTrace {
    #[cfg(test)]
    pub(crate) fn from_parts(n_chains: usize, t_max: usize, entries: Vec<TraceEntry>) -> Self {
        Self {
            n_chains,
            t_max,
            entries,
        }
    }

    pub fn n_chains(&self) -> usize {
        self.n_chains
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    pub fn entries(&self) -> &[TraceEntry] {
        &self.entries
    }

    /// Per-chain series of one statistic over iterations 1..=t_max.
    pub fn series(&self, kind: MonitorKind, variable: Option<usize>) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::with_capacity(self.t_max); self.n_chains];
        for e in &self.entries {
            if e.kind == kind && e.variable == variable {
                out[e.chain - 1].push(e.value);
            }
        }
        out
    }
}

/// The completed datasets of all chains as of one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointSnapshot {
    pub iteration: usize,
    /// One completed dataset per chain, in chain order.
    pub completed: Vec<DataMatrix>,
}

/// Fills every missing cell with a uniform draw (with replacement) from the
/// observed cells of the same column; iteration counter starts at 0.
pub fn initialize(
    rng: &mut RngStream,
    data: &DataMatrix,
    mask: &MissingMask,
) -> Result<ImputationState> {
    initialize_chain(rng, data, mask, 1)
}

fn initialize_chain(
    rng: &mut RngStream,
    data: &DataMatrix,
    mask: &MissingMask,
    chain_id: usize,
) -> Result<ImputationState> {
    if mask.n_rows() != data.n_rows() || mask.n_cols() != data.n_cols() {
        return Err(Error::Domain(format!(
            "mask shape {}x{} does not match data shape {}x{}",
            mask.n_rows(),
            mask.n_cols(),
            data.n_rows(),
            data.n_cols()
        )));
    }
    let mut completed = data.clone();
    for col in 0..data.n_cols() {
        let observed: Vec<f64> = (0..data.n_rows())
            .filter(|&i| !mask.is_missing(i, col))
            .map(|i| data.get(i, col))
            .collect();
        if observed.len() < 2 {
            return Err(Error::TooFewObserved {
                column: data.name(col).to_string(),
                observed: observed.len(),
            });
        }
        for row in 0..data.n_rows() {
            if mask.is_missing(row, col) {
                completed.set(row, col, observed[rng.index(observed.len())]);
            }
        }
    }
    Ok(ImputationState {
        completed,
        mask: mask.clone(),
        iteration: 0,
        chain_id,
    })
}

/// One Bayesian normal-linear imputation of column `col`.
///
/// On the rows where `col` is observed, regress it on all other columns plus
/// an intercept: `S = X'X + RIDGE * diag(X'X)`, `beta_hat = S^{-1} X'y`. Draw
/// the residual variance as `sigma*^2 = RSS / g` with `g ~ chi-square(n_obs -
/// q)`, perturb the coefficients as `beta* = beta_hat + sigma* L_V z` where
/// `L_V` is the Cholesky factor of `V = S^{-1}`, and overwrite the missing
/// cells with `X_mis beta* + sigma* z'`. Only masked cells of `col` change.
pub fn impute_variable(
    rng: &mut RngStream,
    state: &mut ImputationState,
    col: usize,
) -> Result<()> {
    let n = state.completed.n_rows();
    let p = state.completed.n_cols();
    let mis_rows: Vec<usize> = (0..n)
        .filter(|&i| state.mask.is_missing(i, col))
        .collect();
    if mis_rows.is_empty() {
        return Ok(());
    }
    let obs_rows: Vec<usize> = (0..n)
        .filter(|&i| !state.mask.is_missing(i, col))
        .collect();
    let q = p; // intercept + (p - 1) predictors
    let n_obs = obs_rows.len();
    let column_name = state.completed.name(col).to_string();
    if n_obs <= q {
        return Err(Error::DegenerateResidual {
            column: column_name,
            n_obs,
            n_params: q,
        });
    }

    let design_row = |data: &DataMatrix, i: usize, buf: &mut Vec<f64>| {
        buf.clear();
        buf.push(1.0);
        for j in 0..p {
            if j != col {
                buf.push(data.get(i, j));
            }
        }
    };

    // normal equations on the observed rows
    let mut s = SquareMatrix::zeros(q);
    let mut xty = vec![0.0; q];
    let mut x = Vec::with_capacity(q);
    for &i in &obs_rows {
        design_row(&state.completed, i, &mut x);
        let yi = state.completed.get(i, col);
        for a in 0..q {
            xty[a] += x[a] * yi;
            for b in a..q {
                s.set(a, b, s.get(a, b) + x[a] * x[b]);
            }
        }
    }
    for a in 0..q {
        for b in (a + 1)..q {
            let v = s.get(a, b);
            s.set(b, a, v);
        }
        s.set(a, a, s.get(a, a) * (1.0 + RIDGE));
    }

    let singular = |e: Error| Error::SingularSystem {
        column: column_name.clone(),
        detail: e.to_string(),
    };
    let beta_hat = s.solve_spd(&xty).map_err(singular)?;

    let mut rss = 0.0;
    for &i in &obs_rows {
        design_row(&state.completed, i, &mut x);
        let fitted: f64 = x.iter().zip(&beta_hat).map(|(a, b)| a * b).sum();
        let r = state.completed.get(i, col) - fitted;
        rss += r * r;
    }

    let g = rng.chi_square((n_obs - q) as u32);
    let sigma2_star = rss / g;
    let sigma_star = sigma2_star.sqrt();

    let v = s.invert_spd().map_err(|e| Error::SingularSystem {
        column: column_name.clone(),
        detail: e.to_string(),
    })?;
    let l_v = v.cholesky().map_err(|e| Error::SingularSystem {
        column: column_name.clone(),
        detail: e.to_string(),
    })?;
    let z: Vec<f64> = (0..q).map(|_| rng.std_normal()).collect();
    let mut beta_star = beta_hat;
    for i in 0..q {
        let mut dot = 0.0;
        for k in 0..=i {
            dot += l_v.get(i, k) * z[k];
        }
        beta_star[i] += sigma_star * dot;
    }

    let mut imputed = Vec::with_capacity(mis_rows.len());
    for &i in &mis_rows {
        design_row(&state.completed, i, &mut x);
        let fitted: f64 = x.iter().zip(&beta_star).map(|(a, b)| a * b).sum();
        imputed.push((i, fitted + sigma_star * rng.std_normal()));
    }
    for (i, value) in imputed {
        state.completed.set(i, col, value);
    }
    Ok(())
}

/// Runs `n_chains` independent chains for `t_max` iterations, recording the
/// monitored statistics after every full sweep. Chains draw from disjoint
/// stream addresses derived from `base`; the returned states reflect
/// iteration `t_max`.
pub fn run_chains(
    base: &RngStream,
    data: &DataMatrix,
    mask: &MissingMask,
    n_chains: usize,
    t_max: usize,
    monitors: &[MonitorKind],
) -> Result<(Vec<ImputationState>, ChainTrace)> {
    let (states, trace, _) =
        run_chains_with_snapshots(base, data, mask, n_chains, t_max, monitors, &[])?;
    Ok((states, trace))
}

/// [`run_chains`] that additionally snapshots every chain's completed data at
/// the requested iterations. Snapshot iterations must lie in `1..=t_max`.
pub fn run_chains_with_snapshots(
    base: &RngStream,
    data: &DataMatrix,
    mask: &MissingMask,
    n_chains: usize,
    t_max: usize,
    monitors: &[MonitorKind],
    snapshot_iters: &[usize],
) -> Result<(Vec<ImputationState>, ChainTrace, Vec<CheckpointSnapshot>)> {
    if n_chains < 2 {
        return Err(Error::Domain(
            "run_chains needs at least 2 chains (rhat is undefined otherwise)".into(),
        ));
    }
    if t_max < 1 {
        return Err(Error::Domain("t_max must be at least 1".into()));
    }
    let mut snap_iters: Vec<usize> = snapshot_iters.to_vec();
    snap_iters.sort_unstable();
    snap_iters.dedup();
    if snap_iters.iter().any(|&t| t < 1 || t > t_max) {
        return Err(Error::Domain(format!(
            "snapshot iterations must lie in 1..={t_max}"
        )));
    }

    let monitored_cols = mask.columns_with_missing();
    let mut entries = Vec::new();
    let mut snapshots: Vec<CheckpointSnapshot> = snap_iters
        .iter()
        .map(|&t| CheckpointSnapshot {
            iteration: t,
            completed: Vec::with_capacity(n_chains),
        })
        .collect();
    let mut final_states = Vec::with_capacity(n_chains);

    for chain in 1..=n_chains {
        let chain_id = chain as u64;
        let mut init_rng = base.substream(
            base.id()
                .with_chain(chain_id)
                .with_purpose(Purpose::Initialize),
        );
        let mut state = initialize_chain(&mut init_rng, data, mask, chain)?;
        for t in 1..=t_max {
            let mut sweep_rng = base.substream(
                base.id()
                    .with_chain(chain_id)
                    .with_purpose(Purpose::Sweep(t as u32)),
            );
            for col in 0..data.n_cols() {
                impute_variable(&mut sweep_rng, &mut state, col).map_err(|e| {
                    Error::ChainStep {
                        chain,
                        iteration: t,
                        column: data.name(col).to_string(),
                        source: Box::new(e),
                    }
                })?;
            }
            state.iteration = t;
            #[cfg(debug_assertions)]
            assert_observed_unchanged(data, &state);
            record_monitors(&mut entries, &state, &monitored_cols, monitors, chain, t)?;
            if let Ok(pos) = snap_iters.binary_search(&t) {
                snapshots[pos].completed.push(state.completed.clone());
            }
        }
        final_states.push(state);
    }

    let trace = ChainTrace {
        n_chains,
        t_max,
        entries,
    };
    Ok((final_states, trace, snapshots))
}

#[cfg(debug_assertions)]
fn assert_observed_unchanged(data: &DataMatrix, state: &ImputationState) {
    for i in 0..data.n_rows() {
        for j in 0..data.n_cols() {
            if !state.mask.is_missing(i, j) {
                debug_assert_eq!(
                    state.completed.get(i, j),
                    data.get(i, j),
                    "observed cell ({i},{j}) changed during imputation"
                );
            }
        }
    }
}

fn record_monitors(
    entries: &mut Vec<TraceEntry>,
    state: &ImputationState,
    monitored_cols: &[usize],
    monitors: &[MonitorKind],
    chain: usize,
    iteration: usize,
) -> Result<()> {
    for &kind in monitors {
        match kind {
            MonitorKind::ImputedMean | MonitorKind::ImputedVar => {
                for &col in monitored_cols {
                    let cells: Vec<f64> = (0..state.completed.n_rows())
                        .filter(|&i| state.mask.is_missing(i, col))
                        .map(|i| state.completed.get(i, col))
                        .collect();
                    let mean = cells.iter().sum::<f64>() / cells.len() as f64;
                    let value = match kind {
                        MonitorKind::ImputedMean => mean,
                        MonitorKind::ImputedVar => {
                            if cells.len() < 2 {
                                0.0
                            } else {
                                cells.iter().map(|c| (c - mean).powi(2)).sum::<f64>()
                                    / (cells.len() as f64 - 1.0)
                            }
                        }
                        _ => unreachable!(),
                    };
                    entries.push(TraceEntry {
                        chain,
                        iteration,
                        kind,
                        variable: Some(col),
                        value,
                    });
                }
            }
            MonitorKind::ThetaHat => {
                let fit = analysis::fit_ols(&state.completed).map_err(|e| Error::ChainStep {
                    chain,
                    iteration,
                    column: "theta_hat monitor".into(),
                    source: Box::new(e),
                })?;
                entries.push(TraceEntry {
                    chain,
                    iteration,
                    kind,
                    variable: None,
                    value: fit.estimate,
                });
            }
            MonitorKind::Lambda1 => {
                let cov = covariance_matrix(&state.completed).map_err(|e| Error::ChainStep {
                    chain,
                    iteration,
                    column: "lambda1 monitor".into(),
                    source: Box::new(e),
                })?;
                // A near-degenerate spectrum can stall the power iteration;
                // the final Rayleigh quotient is still the best available
                // value for a monitored series, so use it rather than abort.
                let value = match cov.leading_eigenvalue(EIGEN_TOL, EIGEN_MAX_ITER) {
                    Ok(v) => v,
                    Err(Error::NoConvergence { last_estimate, .. }) => last_estimate,
                    Err(e) => {
                        return Err(Error::ChainStep {
                            chain,
                            iteration,
                            column: "lambda1 monitor".into(),
                            source: Box::new(e),
                        })
                    }
                };
                entries.push(TraceEntry {
                    chain,
                    iteration,
                    kind,
                    variable: None,
                    value,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{ampute_mcar, simulate_dataset, PopulationSpec};
    use crate::numkit::StreamId;

    fn base_stream(seed: u64) -> RngStream {
        RngStream::new(seed, StreamId::new(1, 1, 0, Purpose::Root))
    }

    fn toy_data() -> DataMatrix {
        let spec = PopulationSpec {
            n_cases: 60,
            ..Default::default()
        };
        let mut rng = RngStream::new(5, StreamId::new(1, 1, 0, Purpose::Simulate));
        simulate_dataset(&mut rng, &spec).unwrap()
    }

    fn toy_mask(data: &DataMatrix, p: f64, seed: u64) -> MissingMask {
        let mut rng = RngStream::new(seed, StreamId::new(1, 1, 0, Purpose::Ampute));
        ampute_mcar(&mut rng, data.n_rows(), data.n_cols(), p).unwrap()
    }

    #[test]
    fn initialize_no_missing_is_identity() {
        let data = toy_data();
        let mask = MissingMask::all_observed(data.n_rows(), data.n_cols());
        let mut rng = base_stream(1);
        let state = initialize(&mut rng, &data, &mask).unwrap();
        assert_eq!(state.completed(), &data);
        assert_eq!(state.iteration(), 0);
    }

    #[test]
    fn initialize_draws_from_observed_values() {
        let data = toy_data();
        let mask = toy_mask(&data, 0.4, 9);
        let mut rng = base_stream(2);
        let state = initialize(&mut rng, &data, &mask).unwrap();
        for col in 0..data.n_cols() {
            let observed: Vec<f64> = (0..data.n_rows())
                .filter(|&i| !mask.is_missing(i, col))
                .map(|i| data.get(i, col))
                .collect();
            for row in 0..data.n_rows() {
                if mask.is_missing(row, col) {
                    let v = state.completed().get(row, col);
                    assert!(observed.contains(&v), "cell ({row},{col}) not resampled");
                }
            }
        }
    }

    #[test]
    fn initialize_is_deterministic() {
        let data = toy_data();
        let mask = toy_mask(&data, 0.3, 4);
        let a = initialize(&mut base_stream(7), &data, &mask).unwrap();
        let b = initialize(&mut base_stream(7), &data, &mask).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn initialize_rejects_starved_column() {
        let data = DataMatrix::from_rows(
            vec!["a".into(), "b".into()],
            &[vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]],
        )
        .unwrap();
        let mut mask = MissingMask::all_observed(3, 2);
        mask.set_missing(0, 0, true);
        mask.set_missing(1, 0, true);
        let err = initialize(&mut base_stream(1), &data, &mask);
        assert!(matches!(err, Err(Error::TooFewObserved { .. })));
    }

    #[test]
    fn impute_noop_without_missing_cells() {
        let data = toy_data();
        let mask = MissingMask::all_observed(data.n_rows(), data.n_cols());
        let mut rng = base_stream(3);
        let mut state = initialize(&mut rng, &data, &mask).unwrap();
        let before = state.clone();
        impute_variable(&mut rng, &mut state, 0).unwrap();
        assert_eq!(state, before);
    }

    #[test]
    fn impute_exact_linear_relation_gives_deterministic_fit() {
        // y = 2 x1 exactly: zero residual variance, imputations equal the fit
        let n = 30;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let x = i as f64 / 7.0 - 2.0;
                vec![x, 2.0 * x]
            })
            .collect();
        let data = DataMatrix::from_rows(vec!["x1".into(), "y".into()], &rows).unwrap();
        let mut mask = MissingMask::all_observed(n, 2);
        for i in [3, 11, 19] {
            mask.set_missing(i, 1, true);
        }
        let mut rng = base_stream(8);
        let mut state = initialize(&mut rng, &data, &mask).unwrap();
        impute_variable(&mut rng, &mut state, 1).unwrap();
        // the ridge perturbs the fit by ~1e-5 relative, so "equal to the
        // deterministic fit" holds to that order, not machine precision
        for i in [3, 11, 19] {
            let want = 2.0 * data.get(i, 0);
            assert!(
                (state.completed().get(i, 1) - want).abs() < 1e-3,
                "row {i}: {} vs {want}",
                state.completed().get(i, 1)
            );
        }
    }

    #[test]
    fn impute_intercept_only_matches_posterior_predictive_mean() {
        // Single-column data: the regression degenerates to intercept-only,
        // so imputations are Normal(beta0*, sigma*^2). With 10k observed and
        // 10k missing cells the empirical mean of the imputations must land
        // within 4 sigma / sqrt(10000) of the observed mean, where the
        // tolerance absorbs both the cell noise and the beta0* draw.
        let n_obs = 10_000;
        let n_mis = 10_000;
        let mut rng = RngStream::new(21, StreamId::new(1, 1, 0, Purpose::Simulate));
        let mut rows = Vec::with_capacity(n_obs + n_mis);
        for _ in 0..(n_obs + n_mis) {
            rows.push(vec![5.0 + 2.0 * rng.std_normal()]);
        }
        let data = DataMatrix::from_rows(vec!["y".into()], &rows).unwrap();
        let mut mask = MissingMask::all_observed(n_obs + n_mis, 1);
        for i in n_obs..(n_obs + n_mis) {
            mask.set_missing(i, 0, true);
        }
        let y_obs: Vec<f64> = (0..n_obs).map(|i| data.get(i, 0)).collect();
        let obs_mean = y_obs.iter().sum::<f64>() / n_obs as f64;
        let obs_sd = (y_obs.iter().map(|v| (v - obs_mean).powi(2)).sum::<f64>()
            / (n_obs as f64 - 1.0))
            .sqrt();

        let mut engine_rng = base_stream(22);
        let mut state = initialize(&mut engine_rng, &data, &mask).unwrap();
        impute_variable(&mut engine_rng, &mut state, 0).unwrap();
        let imputed: Vec<f64> = (n_obs..(n_obs + n_mis))
            .map(|i| state.completed().get(i, 0))
            .collect();
        let imp_mean = imputed.iter().sum::<f64>() / n_mis as f64;
        assert!(
            (imp_mean - obs_mean).abs() < 4.0 * obs_sd / (n_mis as f64).sqrt(),
            "imputed mean {imp_mean} vs observed mean {obs_mean}"
        );
    }

    #[test]
    fn impute_refuses_without_residual_df() {
        let data = DataMatrix::from_rows(
            vec!["a".into(), "b".into()],
            &[
                vec![1.0, 1.0],
                vec![2.0, 4.0],
                vec![3.0, 2.0],
                vec![4.0, 0.0],
            ],
        )
        .unwrap();
        let mut mask = MissingMask::all_observed(4, 2);
        mask.set_missing(0, 1, true);
        mask.set_missing(1, 1, true);
        // (4 rows) - (2 missing) = 2 observed <= q = 2
        let mut rng = base_stream(5);
        let mut state = initialize(&mut rng, &data, &mask).unwrap();
        let err = impute_variable(&mut rng, &mut state, 1);
        assert!(matches!(err, Err(Error::DegenerateResidual { .. })));
    }

    #[test]
    fn run_chains_constant_trace_without_missingness() {
        let data = toy_data();
        let mask = MissingMask::all_observed(data.n_rows(), data.n_cols());
        let base = base_stream(13);
        let (states, trace) =
            run_chains(&base, &data, &mask, 2, 6, &[MonitorKind::ThetaHat]).unwrap();
        for state in &states {
            assert_eq!(state.completed(), &data);
        }
        let series = trace.series(MonitorKind::ThetaHat, None);
        let direct = analysis::fit_ols(&data).unwrap().estimate;
        for chain in series {
            assert_eq!(chain.len(), 6);
            for v in chain {
                assert_eq!(v, direct);
            }
        }
    }

    #[test]
    fn run_chains_trace_bookkeeping() {
        let data = toy_data();
        let mask = toy_mask(&data, 0.5, 17);
        let n_missing_cols = mask.columns_with_missing().len();
        let base = base_stream(14);
        let (states, trace) = run_chains(&base, &data, &mask, 3, 5, &MonitorKind::ALL).unwrap();
        assert_eq!(states.len(), 3);
        assert_eq!(states[0].iteration(), 5);
        assert_eq!(states[2].chain_id(), 3);
        // per (chain, iteration): one entry per missing column for each
        // per-variable kind, plus the two scalar kinds
        let expected = 3 * 5 * (2 * n_missing_cols + 2);
        assert_eq!(trace.entries().len(), expected);
        for chain in trace.series(MonitorKind::Lambda1, None) {
            assert_eq!(chain.len(), 5);
        }
    }

    #[test]
    fn run_chains_truncation_equivalence() {
        let data = toy_data();
        let mask = toy_mask(&data, 0.4, 23);
        let base = base_stream(15);
        let (_, long_trace, long_snaps) = run_chains_with_snapshots(
            &base,
            &data,
            &mask,
            3,
            20,
            &MonitorKind::ALL,
            &[8],
        )
        .unwrap();
        let (short_states, short_trace) =
            run_chains(&base, &data, &mask, 3, 8, &MonitorKind::ALL).unwrap();

        // trace restricted to iterations 1..=8 is bit-identical
        let long_restricted: Vec<&TraceEntry> = long_trace
            .entries()
            .iter()
            .filter(|e| e.iteration <= 8)
            .collect();
        assert_eq!(long_restricted.len(), short_trace.entries().len());
        for (a, b) in long_restricted.iter().zip(short_trace.entries()) {
            assert_eq!(**a, *b);
        }
        // 8-iteration states equal the snapshot of the long run at t = 8
        for (snap, state) in long_snaps[0].completed.iter().zip(&short_states) {
            assert_eq!(snap, state.completed());
        }
    }

    #[test]
    fn run_chains_prefix_is_stable_under_more_chains() {
        // chains are addressed, not positional: adding a chain does not
        // disturb the existing ones
        let data = toy_data();
        let mask = toy_mask(&data, 0.3, 29);
        let base = base_stream(16);
        let (_, trace2) = run_chains(&base, &data, &mask, 2, 4, &[MonitorKind::ThetaHat]).unwrap();
        let (_, trace3) = run_chains(&base, &data, &mask, 3, 4, &[MonitorKind::ThetaHat]).unwrap();
        let s2 = trace2.series(MonitorKind::ThetaHat, None);
        let s3 = trace3.series(MonitorKind::ThetaHat, None);
        assert_eq!(s2[0], s3[0]);
        assert_eq!(s2[1], s3[1]);
    }

    #[test]
    fn run_chains_validates_arguments() {
        let data = toy_data();
        let mask = toy_mask(&data, 0.2, 31);
        let base = base_stream(17);
        assert!(run_chains(&base, &data, &mask, 1, 5, &MonitorKind::ALL).is_err());
        assert!(run_chains(&base, &data, &mask, 2, 0, &MonitorKind::ALL).is_err());
        assert!(run_chains_with_snapshots(&base, &data, &mask, 2, 5, &MonitorKind::ALL, &[9])
            .is_err());
    }
}
