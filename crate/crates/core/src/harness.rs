//! The simulation loop: repetitions x missingness conditions x early-stopping
//! checkpoints, with performance measures and diagnostics aggregated per
//! condition cell.
//!
//! One long imputation run per (repetition, condition) is checkpointed at the
//! configured iterations instead of literally re-running every early-stopping
//! condition; the engine's truncation equivalence makes the results
//! identical. Each repetition draws a fresh dataset that is shared across the
//! missingness conditions of that repetition.
//!
//! Repetitions are independent work units addressed by their id, so any
//! parallel schedule produces bit-identical output.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::analysis::{evaluate_repetition, fit_ols, pool_rubin};
use crate::datagen::{ampute_mcar, simulate_dataset, true_theta, PopulationSpec};
use crate::diagnostics::{diagnose, DiagnosticValue, DEFAULT_AC_LAG};
use crate::engine::{run_chains_with_snapshots, MonitorKind};
use crate::error::{Error, Result};
use crate::numkit::{spearman_rho, Purpose, RngStream, StreamId};

/// Number of variables in the simulated data (three predictors plus the
/// outcome).
pub const N_VARS: usize = 4;

/// Full description of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Number of simulation repetitions.
    pub n_sim: usize,
    /// Rows per simulated dataset.
    pub n_cases: usize,
    /// Pairwise correlation of the data-generating model.
    pub rho: f64,
    /// Proportions of incomplete cases, each in [0, 1).
    pub p_miss: Vec<f64>,
    /// Early-stopping checkpoints, strictly ascending, within 1..=t_max.
    pub checkpoints: Vec<usize>,
    /// Iterations per chain.
    pub t_max: usize,
    /// Number of chains (= imputations pooled).
    pub m: usize,
    /// Root seed; all randomness derives from it and the stream addresses.
    pub seed: u64,
    /// Worker threads for the repetition loop; 0 means one per core.
    pub workers: usize,
    /// Whether to keep the full monitored traces (large).
    pub emit_traces: bool,
    /// Output directory (used by front ends; the harness never writes).
    pub out_dir: std::path::PathBuf,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_sim: 1000,
            n_cases: 200,
            rho: 0.5,
            p_miss: vec![0.05, 0.25, 0.50, 0.75, 0.95],
            checkpoints: vec![1, 2, 3, 5, 7, 10, 15, 20, 30, 50, 100],
            t_max: 100,
            m: 5,
            seed: 42,
            workers: 0,
            emit_traces: false,
            out_dir: std::path::PathBuf::from("out"),
        }
    }
}

impl SimConfig {
    pub fn population_spec(&self) -> PopulationSpec {
        PopulationSpec {
            n_vars: N_VARS,
            rho: self.rho,
            n_cases: self.n_cases,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sim == 0 {
            return Err(Error::Config("n_sim must be at least 1".into()));
        }
        self.population_spec().validate()?;
        if self.p_miss.is_empty() {
            return Err(Error::Config("p_miss must not be empty".into()));
        }
        for &p in &self.p_miss {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::Config(format!(
                    "p_miss values must lie in [0, 1), got {p}"
                )));
            }
        }
        if self.t_max == 0 {
            return Err(Error::Config("t_max must be at least 1".into()));
        }
        if self.checkpoints.is_empty() {
            return Err(Error::Config("checkpoints must not be empty".into()));
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "checkpoints must be strictly ascending".into(),
            ));
        }
        if self.checkpoints[0] < 1 || *self.checkpoints.last().unwrap() > self.t_max {
            return Err(Error::Config(format!(
                "checkpoints must lie in 1..={}",
                self.t_max
            )));
        }
        if self.m < 2 {
            return Err(Error::Config("m must be at least 2".into()));
        }
        Ok(())
    }
}

/// Outcome of one (repetition, missingness, checkpoint) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRecord {
    pub rep: usize,
    pub p_miss_index: usize,
    pub p_miss: f64,
    pub checkpoint: usize,
    pub qbar: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub covered: bool,
    pub error: f64,
    pub ci_width: f64,
    pub ac_theta: DiagnosticValue,
    pub rhat_theta: DiagnosticValue,
    pub ac_lambda: DiagnosticValue,
    pub rhat_lambda: DiagnosticValue,
}

/// A cell (or whole condition, when `checkpoint` is `None`) that could not be
/// computed. Failures never abort the repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub rep: usize,
    pub p_miss_index: usize,
    pub p_miss: f64,
    pub checkpoint: Option<usize>,
    pub reason: String,
}

/// One monitored value, flattened for serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub rep: u32,
    pub p_miss: f64,
    pub chain: u16,
    pub iteration: u16,
    pub kind: MonitorKind,
    pub variable: Option<u16>,
    pub value: f64,
}

/// Everything produced by one repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct RepetitionResult {
    pub records: Vec<CellRecord>,
    pub failures: Vec<CellFailure>,
    pub trace_rows: Vec<TraceRow>,
}

/// Aggregated performance and diagnostics for one (p_miss, checkpoint) cell.
/// Aggregates are over the successful repetitions; failure counts are
/// reported, never silently folded in. Optional fields are `None` when no
/// defined values existed to aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSummary {
    pub p_miss: f64,
    pub checkpoint: usize,
    pub pct_bias: Option<f64>,
    pub coverage: Option<f64>,
    pub mean_ci_width: Option<f64>,
    pub ac_theta_mean: Option<f64>,
    pub ac_theta_sd: Option<f64>,
    pub rhat_theta_mean: Option<f64>,
    pub rhat_theta_sd: Option<f64>,
    pub ac_lambda_mean: Option<f64>,
    pub ac_lambda_sd: Option<f64>,
    pub rhat_lambda_mean: Option<f64>,
    pub rhat_lambda_sd: Option<f64>,
    pub n_reps: usize,
    pub n_failed: usize,
}

/// Spearman agreement between the two monitored parameters' diagnostics
/// across all cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterCorrelations {
    pub rho_ac: f64,
    pub rho_rhat: f64,
    pub n_pairs_ac: usize,
    pub n_pairs_rhat: usize,
}

/// The complete result of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub theta_true: f64,
    pub column_names: Vec<String>,
    pub records: Vec<CellRecord>,
    pub failures: Vec<CellFailure>,
    pub summaries: Vec<ConditionSummary>,
    /// `None` when too few defined diagnostic pairs existed.
    pub correlations: Option<ParameterCorrelations>,
    pub trace_rows: Vec<TraceRow>,
}

/// Runs one repetition: simulate a dataset, then for every missingness
/// condition ampute, run the chains once to `t_max`, and evaluate pooling and
/// diagnostics at every checkpoint. Expects a config that passes
/// [`SimConfig::validate`].
pub fn run_repetition(config: &SimConfig, rep_id: usize) -> RepetitionResult {
    let spec = config.population_spec();
    let theta_true = true_theta(&spec)
        .expect("validated config has closed-form truth")
        .beta[0];
    let rep = rep_id as u64;

    let mut result = RepetitionResult {
        records: Vec::new(),
        failures: Vec::new(),
        trace_rows: Vec::new(),
    };

    let mut sim_rng = RngStream::new(config.seed, StreamId::new(rep, 0, 0, Purpose::Simulate));
    let data = match simulate_dataset(&mut sim_rng, &spec) {
        Ok(d) => d,
        Err(e) => {
            for (ci, &p) in config.p_miss.iter().enumerate() {
                result.failures.push(CellFailure {
                    rep: rep_id,
                    p_miss_index: ci,
                    p_miss: p,
                    checkpoint: None,
                    reason: format!("simulate: {e}"),
                });
            }
            return result;
        }
    };

    for (ci, &p) in config.p_miss.iter().enumerate() {
        let condition = ci as u64 + 1;
        let fail_condition = |result: &mut RepetitionResult, reason: String| {
            result.failures.push(CellFailure {
                rep: rep_id,
                p_miss_index: ci,
                p_miss: p,
                checkpoint: None,
                reason,
            });
        };

        let mut amp_rng = RngStream::new(
            config.seed,
            StreamId::new(rep, condition, 0, Purpose::Ampute),
        );
        let mask = match ampute_mcar(&mut amp_rng, data.n_rows(), data.n_cols(), p) {
            Ok(m) => m,
            Err(e) => {
                fail_condition(&mut result, format!("ampute: {e}"));
                continue;
            }
        };

        let base = RngStream::new(config.seed, StreamId::new(rep, condition, 0, Purpose::Root));
        let run = run_chains_with_snapshots(
            &base,
            &data,
            &mask,
            config.m,
            config.t_max,
            &MonitorKind::ALL,
            &config.checkpoints,
        );
        let (_, trace, snapshots) = match run {
            Ok(r) => r,
            Err(e) => {
                fail_condition(&mut result, format!("run_chains: {e}"));
                continue;
            }
        };

        let diag_theta = diagnose(
            &trace,
            MonitorKind::ThetaHat,
            None,
            DEFAULT_AC_LAG,
            &config.checkpoints,
        )
        .expect("bounds already checked by run_chains_with_snapshots");
        let diag_lambda = diagnose(
            &trace,
            MonitorKind::Lambda1,
            None,
            DEFAULT_AC_LAG,
            &config.checkpoints,
        )
        .expect("bounds already checked by run_chains_with_snapshots");

        for (k, snap) in snapshots.iter().enumerate() {
            let t = snap.iteration;
            let pooled = snap
                .completed
                .iter()
                .map(fit_ols)
                .collect::<Result<Vec<_>>>()
                .and_then(|analyses| pool_rubin(&analyses));
            match pooled {
                Ok(pooled) => {
                    let outcome = evaluate_repetition(&pooled, theta_true);
                    result.records.push(CellRecord {
                        rep: rep_id,
                        p_miss_index: ci,
                        p_miss: p,
                        checkpoint: t,
                        qbar: pooled.qbar,
                        se: pooled.t_var.sqrt(),
                        ci_low: pooled.ci_low,
                        ci_high: pooled.ci_high,
                        covered: outcome.covered,
                        error: outcome.error,
                        ci_width: outcome.ci_width,
                        ac_theta: diag_theta[k].ac,
                        rhat_theta: diag_theta[k].rhat,
                        ac_lambda: diag_lambda[k].ac,
                        rhat_lambda: diag_lambda[k].rhat,
                    });
                }
                Err(e) => {
                    result.failures.push(CellFailure {
                        rep: rep_id,
                        p_miss_index: ci,
                        p_miss: p,
                        checkpoint: Some(t),
                        reason: format!("pool: {e}"),
                    });
                }
            }
        }

        if config.emit_traces {
            for e in trace.entries() {
                result.trace_rows.push(TraceRow {
                    rep: rep_id as u32,
                    p_miss: p,
                    chain: e.chain as u16,
                    iteration: e.iteration as u16,
                    kind: e.kind,
                    variable: e.variable.map(|v| v as u16),
                    value: e.value,
                });
            }
        }
    }
    result
}

/// Runs the full simulation. Results are bit-identical for any worker count.
pub fn run_simulation(config: &SimConfig) -> Result<SimulationOutput> {
    run_simulation_with_progress(config, |_, _| {})
}

/// [`run_simulation`] with a completion callback `(done, total)`, invoked
/// from worker threads as repetitions finish.
pub fn run_simulation_with_progress<F>(config: &SimConfig, progress: F) -> Result<SimulationOutput>
where
    F: Fn(usize, usize) + Sync,
{
    config.validate()?;
    let theta_true = true_theta(&config.population_spec())?.beta[0];

    let run = || {
        let done = AtomicUsize::new(0);
        (1..=config.n_sim)
            .into_par_iter()
            .map(|rep| {
                let r = run_repetition(config, rep);
                progress(done.fetch_add(1, Ordering::Relaxed) + 1, config.n_sim);
                r
            })
            .collect::<Vec<RepetitionResult>>()
    };
    let per_rep = if config.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(run)
    } else {
        run()
    };

    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut trace_rows = Vec::new();
    for rep in per_rep {
        records.extend(rep.records);
        failures.extend(rep.failures);
        trace_rows.extend(rep.trace_rows);
    }

    let summaries = summarize(config, theta_true, &records, &failures);
    let correlations = correlate_parameters(&records).ok();

    Ok(SimulationOutput {
        theta_true,
        column_names: config.population_spec().column_names(),
        records,
        failures,
        summaries,
        correlations,
        trace_rows,
    })
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

fn sample_sd(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values)?;
    Some(
        (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() as f64 - 1.0))
            .sqrt(),
    )
}

/// Aggregates per-cell records into per-(p_miss, checkpoint) summaries.
pub fn summarize(
    config: &SimConfig,
    theta_true: f64,
    records: &[CellRecord],
    failures: &[CellFailure],
) -> Vec<ConditionSummary> {
    let mut out = Vec::with_capacity(config.p_miss.len() * config.checkpoints.len());
    for (ci, &p) in config.p_miss.iter().enumerate() {
        for &t in &config.checkpoints {
            let cells: Vec<&CellRecord> = records
                .iter()
                .filter(|r| r.p_miss_index == ci && r.checkpoint == t)
                .collect();
            let n_failed = failures
                .iter()
                .filter(|f| f.p_miss_index == ci && f.checkpoint.is_none_or(|ft| ft == t))
                .count();

            let qbars: Vec<f64> = cells.iter().map(|r| r.qbar).collect();
            let pct_bias = mean(&qbars).map(|m| 100.0 * (m - theta_true) / theta_true);
            let coverage = if cells.is_empty() {
                None
            } else {
                Some(
                    cells.iter().filter(|r| r.covered).count() as f64 / cells.len() as f64,
                )
            };
            let widths: Vec<f64> = cells.iter().map(|r| r.ci_width).collect();

            let collect = |get: &dyn Fn(&CellRecord) -> DiagnosticValue| -> Vec<f64> {
                cells.iter().filter_map(|r| get(r).value()).collect()
            };
            let ac_theta = collect(&|r| r.ac_theta);
            let rhat_theta = collect(&|r| r.rhat_theta);
            let ac_lambda = collect(&|r| r.ac_lambda);
            let rhat_lambda = collect(&|r| r.rhat_lambda);

            out.push(ConditionSummary {
                p_miss: p,
                checkpoint: t,
                pct_bias,
                coverage,
                mean_ci_width: mean(&widths),
                ac_theta_mean: mean(&ac_theta),
                ac_theta_sd: sample_sd(&ac_theta),
                rhat_theta_mean: mean(&rhat_theta),
                rhat_theta_sd: sample_sd(&rhat_theta),
                ac_lambda_mean: mean(&ac_lambda),
                ac_lambda_sd: sample_sd(&ac_lambda),
                rhat_lambda_mean: mean(&rhat_lambda),
                rhat_lambda_sd: sample_sd(&rhat_lambda),
                n_reps: config.n_sim,
                n_failed,
            });
        }
    }
    out
}

/// Spearman correlation between the theta-hat and lambda-1 diagnostics
/// across all (repetition, p_miss, checkpoint) cells, pairwise-dropping
/// undefined values. Needs at least 3 defined pairs per identifier.
pub fn correlate_parameters(records: &[CellRecord]) -> Result<ParameterCorrelations> {
    let mut ac_theta = Vec::new();
    let mut ac_lambda = Vec::new();
    let mut rhat_theta = Vec::new();
    let mut rhat_lambda = Vec::new();
    for r in records {
        if let (Some(a), Some(b)) = (r.ac_theta.value(), r.ac_lambda.value()) {
            ac_theta.push(a);
            ac_lambda.push(b);
        }
        if let (Some(a), Some(b)) = (r.rhat_theta.value(), r.rhat_lambda.value()) {
            rhat_theta.push(a);
            rhat_lambda.push(b);
        }
    }
    if ac_theta.len() < 3 || rhat_theta.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "correlate_parameters: need at least 3 defined pairs, got {} (ac) and {} (rhat)",
            ac_theta.len(),
            rhat_theta.len()
        )));
    }
    Ok(ParameterCorrelations {
        rho_ac: spearman_rho(&ac_theta, &ac_lambda)?,
        rho_rhat: spearman_rho(&rhat_theta, &rhat_lambda)?,
        n_pairs_ac: ac_theta.len(),
        n_pairs_rhat: rhat_theta.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> SimConfig {
        SimConfig {
            n_sim: 3,
            n_cases: 60,
            checkpoints: vec![1, 2, 4, 8],
            t_max: 8,
            p_miss: vec![0.0, 0.4],
            seed: 7,
            ..Default::default()
        }
    }

    #[test]
    fn config_validation_catches_bad_values() {
        let ok = tiny_config();
        ok.validate().unwrap();
        for breaker in [
            |c: &mut SimConfig| c.n_sim = 0,
            |c: &mut SimConfig| c.p_miss = vec![1.5],
            |c: &mut SimConfig| c.p_miss = vec![],
            |c: &mut SimConfig| c.checkpoints = vec![2, 2],
            |c: &mut SimConfig| c.checkpoints = vec![0, 3],
            |c: &mut SimConfig| c.checkpoints = vec![1, 99],
            |c: &mut SimConfig| c.m = 1,
            |c: &mut SimConfig| c.rho = 1.0,
            |c: &mut SimConfig| c.t_max = 0,
        ] {
            let mut bad = tiny_config();
            breaker(&mut bad);
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn repetition_bookkeeping_and_determinism() {
        let config = tiny_config();
        let a = run_repetition(&config, 1);
        let b = run_repetition(&config, 1);
        assert_eq!(a, b);
        assert!(a.failures.is_empty());
        assert_eq!(
            a.records.len(),
            config.p_miss.len() * config.checkpoints.len()
        );
        let c = run_repetition(&config, 2);
        assert_ne!(a.records[0].qbar, c.records[0].qbar);
    }

    #[test]
    fn no_missingness_records_are_checkpoint_invariant() {
        let config = tiny_config();
        let rep = run_repetition(&config, 1);
        let cells: Vec<&CellRecord> =
            rep.records.iter().filter(|r| r.p_miss_index == 0).collect();
        assert_eq!(cells.len(), config.checkpoints.len());
        for cell in &cells[1..] {
            assert_eq!(cell.qbar, cells[0].qbar);
            assert_eq!(cell.ci_low, cells[0].ci_low);
            assert_eq!(cell.ci_high, cells[0].ci_high);
        }
        // constant chains make the diagnostics degenerate, not numeric
        for cell in &cells {
            assert!(!cell.ac_theta.is_defined());
            assert!(!cell.rhat_theta.is_defined());
        }
    }

    #[test]
    fn simulation_output_shapes() {
        let config = tiny_config();
        let out = run_simulation(&config).unwrap();
        assert_eq!(
            out.records.len(),
            config.n_sim * config.p_miss.len() * config.checkpoints.len()
        );
        assert_eq!(
            out.summaries.len(),
            config.p_miss.len() * config.checkpoints.len()
        );
        assert!((out.theta_true - 0.25).abs() < 1e-12);
        assert_eq!(out.column_names, vec!["x1", "x2", "x3", "y"]);
        assert!(out.trace_rows.is_empty());
        for s in &out.summaries {
            assert_eq!(s.n_reps, config.n_sim);
            assert_eq!(s.n_failed, 0);
            let cov = s.coverage.unwrap();
            assert!((0.0..=1.0).contains(&cov));
        }
    }

    #[test]
    fn single_repetition_summary_equals_its_record() {
        let config = SimConfig {
            n_sim: 1,
            ..tiny_config()
        };
        let out = run_simulation(&config).unwrap();
        for s in &out.summaries {
            let r = out
                .records
                .iter()
                .find(|r| r.p_miss == s.p_miss && r.checkpoint == s.checkpoint)
                .unwrap();
            let bias = 100.0 * (r.qbar - out.theta_true) / out.theta_true;
            assert_eq!(s.pct_bias.unwrap(), bias);
            assert_eq!(s.coverage.unwrap(), r.covered as u8 as f64);
            assert_eq!(s.mean_ci_width.unwrap(), r.ci_width);
            assert_eq!(s.ac_theta_mean, r.ac_theta.value());
            assert!(s.ac_theta_sd.is_none());
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut config = tiny_config();
        config.n_sim = 4;
        config.workers = 1;
        let serial = run_simulation(&config).unwrap();
        config.workers = 3;
        let parallel = run_simulation(&config).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn traces_emitted_when_requested() {
        let mut config = tiny_config();
        config.emit_traces = true;
        config.n_sim = 1;
        let out = run_simulation(&config).unwrap();
        // p = 0.0 condition contributes only scalar monitors
        assert!(!out.trace_rows.is_empty());
        let scalar_rows = out
            .trace_rows
            .iter()
            .filter(|r| r.p_miss == 0.0)
            .count();
        assert_eq!(scalar_rows, config.m * config.t_max * 2);
    }

    #[test]
    fn correlate_parameters_trivial_columns() {
        let config = SimConfig {
            n_sim: 4,
            p_miss: vec![0.4],
            ..tiny_config()
        };
        let out = run_simulation(&config).unwrap();
        // feed identical diagnostic columns: correlation is exactly 1
        let mut doctored = out.records.clone();
        for r in &mut doctored {
            r.ac_lambda = r.ac_theta;
            r.rhat_lambda = r.rhat_theta;
        }
        let c = correlate_parameters(&doctored).unwrap();
        assert!((c.rho_ac - 1.0).abs() < 1e-12);
        assert!((c.rho_rhat - 1.0).abs() < 1e-12);

        // anti-monotone synthetic columns: exactly -1
        let mut flipped = out.records.clone();
        for r in &mut flipped {
            if let Some(v) = r.ac_theta.value() {
                r.ac_lambda = DiagnosticValue::Value(-v);
            }
            if let Some(v) = r.rhat_theta.value() {
                r.rhat_lambda = DiagnosticValue::Value(-v);
            }
        }
        let c = correlate_parameters(&flipped).unwrap();
        assert!((c.rho_ac + 1.0).abs() < 1e-12);
        assert!((c.rho_rhat + 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlate_parameters_needs_pairs() {
        assert!(matches!(
            correlate_parameters(&[]),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn starved_condition_fails_without_aborting_the_repetition() {
        // 5 rows at 90% incomplete cases starves the regressions; the
        // condition is recorded as failed and the p = 0 condition still
        // produces its records
        let config = SimConfig {
            n_sim: 1,
            n_cases: 5,
            p_miss: vec![0.0, 0.9],
            checkpoints: vec![1, 2],
            t_max: 2,
            m: 2,
            seed: 0,
            ..Default::default()
        };
        let rep = run_repetition(&config, 1);
        assert_eq!(rep.records.len(), 2);
        assert!(rep.records.iter().all(|r| r.p_miss == 0.0));
        assert_eq!(rep.failures.len(), 1);
        let failure = &rep.failures[0];
        assert_eq!(failure.p_miss, 0.9);
        assert_eq!(failure.checkpoint, None);
        assert!(
            failure.reason.contains("chain 1, iteration 1"),
            "reason lacks schedule annotation: {}",
            failure.reason
        );

        // aggregation reports the failure instead of folding it in
        let out = run_simulation(&config).unwrap();
        let failed = out
            .summaries
            .iter()
            .find(|s| s.p_miss == 0.9 && s.checkpoint == 1)
            .unwrap();
        assert_eq!(failed.n_failed, 1);
        assert!(failed.pct_bias.is_none());
        assert!(failed.coverage.is_none());
        let ok = out
            .summaries
            .iter()
            .find(|s| s.p_miss == 0.0 && s.checkpoint == 1)
            .unwrap();
        assert_eq!(ok.n_failed, 0);
        assert!(ok.pct_bias.is_some());
    }
}

