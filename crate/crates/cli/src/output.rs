//! Serialization of simulation results: plot-ready CSV files plus a JSON run
//! manifest with content digests. Files are written atomically
//! (temp-and-rename) and the manifest is always written last; a failed run
//! cleans up whatever it had already written.
//!
//! CSV conventions: `# schema=1` comment line, then a header row; comma
//! separator, LF line terminator; floats carry 17 significant digits so they
//! round-trip exactly; undefined diagnostics are empty fields; booleans are
//! 0/1.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use iterimp::diagnostics::DiagnosticValue;
use iterimp::harness::{SimConfig, SimulationOutput};

/// Current CSV schema version, echoed in each file's comment line.
pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Serialize a float with 17 significant digits (exact f64 round trip).
pub fn fmt_g17(v: f64) -> String {
    format!("{:.16e}", v)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_g17).unwrap_or_default()
}

fn fmt_diag(v: DiagnosticValue) -> String {
    fmt_opt(v.value())
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureCount {
    pub p_miss: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub rho_ac: f64,
    pub rho_rhat: f64,
    pub n_pairs_ac: usize,
    pub n_pairs_rhat: usize,
}

/// Everything needed to audit a run: the effective configuration, timing,
/// per-condition failure counts, and the emitted files with their digests.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub seed: u64,
    pub started_at: String,
    pub finished_at: String,
    pub config: serde_json::Value,
    pub theta_true: f64,
    pub parameter_correlations: Option<CorrelationReport>,
    pub failure_counts: Vec<FailureCount>,
    pub outputs: Vec<FileEntry>,
}

fn config_echo(config: &SimConfig) -> serde_json::Value {
    serde_json::json!({
        "n_sim": config.n_sim,
        "n_cases": config.n_cases,
        "rho": config.rho,
        "p_miss": config.p_miss,
        "checkpoints": config.checkpoints,
        "t_max": config.t_max,
        "m": config.m,
        "seed": config.seed,
        "workers": config.workers,
        "emit_traces": config.emit_traces,
        "out_dir": config.out_dir.display().to_string(),
    })
}

fn render_summary_csv(output: &SimulationOutput) -> String {
    let mut s = format!("# schema={CSV_SCHEMA_VERSION}\n");
    s.push_str(
        "p_miss,checkpoint,pct_bias,coverage,mean_ci_width,\
         ac_theta_mean,ac_theta_sd,rhat_theta_mean,rhat_theta_sd,\
         ac_lambda_mean,ac_lambda_sd,rhat_lambda_mean,rhat_lambda_sd,\
         n_reps,n_failed\n",
    );
    for row in &output.summaries {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt_g17(row.p_miss),
            row.checkpoint,
            fmt_opt(row.pct_bias),
            fmt_opt(row.coverage),
            fmt_opt(row.mean_ci_width),
            fmt_opt(row.ac_theta_mean),
            fmt_opt(row.ac_theta_sd),
            fmt_opt(row.rhat_theta_mean),
            fmt_opt(row.rhat_theta_sd),
            fmt_opt(row.ac_lambda_mean),
            fmt_opt(row.ac_lambda_sd),
            fmt_opt(row.rhat_lambda_mean),
            fmt_opt(row.rhat_lambda_sd),
            row.n_reps,
            row.n_failed,
        ));
    }
    s
}

fn render_repetitions_csv(output: &SimulationOutput) -> String {
    let mut s = format!("# schema={CSV_SCHEMA_VERSION}\n");
    s.push_str(
        "rep,p_miss,checkpoint,qbar,se,ci_low,ci_high,covered,error,\
         ac_theta,rhat_theta,ac_lambda,rhat_lambda\n",
    );
    for r in &output.records {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.rep,
            fmt_g17(r.p_miss),
            r.checkpoint,
            fmt_g17(r.qbar),
            fmt_g17(r.se),
            fmt_g17(r.ci_low),
            fmt_g17(r.ci_high),
            r.covered as u8,
            fmt_g17(r.error),
            fmt_diag(r.ac_theta),
            fmt_diag(r.rhat_theta),
            fmt_diag(r.ac_lambda),
            fmt_diag(r.rhat_lambda),
        ));
    }
    s
}

fn render_trace_csv(output: &SimulationOutput) -> String {
    let mut s = format!("# schema={CSV_SCHEMA_VERSION}\n");
    s.push_str("rep,p_miss,chain,iteration,statistic,variable,value\n");
    for t in &output.trace_rows {
        let variable = t
            .variable
            .map(|v| output.column_names[v as usize].clone())
            .unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            t.rep,
            fmt_g17(t.p_miss),
            t.chain,
            t.iteration,
            t.kind.label(),
            variable,
            fmt_g17(t.value),
        ));
    }
    s
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let tmp = dir.join(format!("{name}.tmp"));
    let path = dir.join(name);
    let write = || -> Result<()> {
        fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &path)
            .with_context(|| format!("renaming {} into place", tmp.display()))?;
        Ok(())
    };
    match write() {
        Ok(()) => Ok(path),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

/// Writes `summary.csv`, `repetitions.csv`, optionally `trace.csv`, and
/// finally `manifest.json` into the configured output directory. On error,
/// files written so far are removed.
pub fn emit_outputs(
    output: &SimulationOutput,
    config: &SimConfig,
    started_at: &str,
) -> Result<RunManifest> {
    let dir = &config.out_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;

    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| -> Result<RunManifest> {
        let mut entries = Vec::new();
        let mut emit = |name: &str, content: String| -> Result<()> {
            let bytes = content.into_bytes();
            let digest = Sha256::digest(&bytes);
            entries.push(FileEntry {
                name: name.to_string(),
                bytes: bytes.len(),
                sha256: format!("{digest:x}"),
            });
            written.push(write_atomic(dir, name, &bytes)?);
            Ok(())
        };

        emit("summary.csv", render_summary_csv(output))?;
        emit("repetitions.csv", render_repetitions_csv(output))?;
        if config.emit_traces {
            emit("trace.csv", render_trace_csv(output))?;
        }

        let failure_counts = config
            .p_miss
            .iter()
            .enumerate()
            .map(|(ci, &p)| FailureCount {
                p_miss: p,
                count: output
                    .failures
                    .iter()
                    .filter(|f| f.p_miss_index == ci)
                    .count(),
            })
            .collect();

        let manifest = RunManifest {
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            started_at: started_at.to_string(),
            finished_at: chrono::Utc::now().to_rfc3339(),
            config: config_echo(config),
            theta_true: output.theta_true,
            parameter_correlations: output.correlations.map(|c| CorrelationReport {
                rho_ac: c.rho_ac,
                rho_rhat: c.rho_rhat,
                n_pairs_ac: c.n_pairs_ac,
                n_pairs_rhat: c.n_pairs_rhat,
            }),
            failure_counts,
            outputs: entries,
        };
        let json = serde_json::to_string_pretty(&manifest).context("serializing manifest")?;
        written.push(write_atomic(dir, "manifest.json", json.into_bytes().as_slice())?);
        Ok(manifest)
    })();

    if result.is_err() {
        for path in &written {
            let _ = fs::remove_file(path);
        }
    }
    result
}
