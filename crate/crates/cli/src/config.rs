//! Command-line and config-file handling. Flags override file values, which
//! override the built-in defaults; unknown config keys are errors.

use std::path::PathBuf;

use clap::Parser;
use iterimp::harness::SimConfig;

/// Iterative-imputation simulation harness: measures bias, coverage, and
/// convergence diagnostics of early-stopped chained-equations imputation
/// across missingness severities, and writes plot-ready CSV.
#[derive(Debug, Parser)]
#[command(name = "iterimp", version)]
pub struct Cli {
    /// Number of simulation repetitions.
    #[arg(long)]
    pub n_sim: Option<usize>,

    /// Rows per simulated dataset.
    #[arg(long)]
    pub n_cases: Option<usize>,

    /// Pairwise correlation of the data-generating model.
    #[arg(long)]
    pub rho: Option<f64>,

    /// Comma-separated proportions of incomplete cases, each in [0, 1).
    #[arg(long, value_delimiter = ',')]
    pub p_miss: Option<Vec<f64>>,

    /// Comma-separated early-stopping checkpoints (ascending, <= t-max).
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<usize>>,

    /// Iterations per chain.
    #[arg(long)]
    pub t_max: Option<usize>,

    /// Number of chains (= imputations pooled).
    #[arg(long)]
    pub m: Option<usize>,

    /// Root seed for all random streams.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,

    /// Also write the per-iteration monitored traces (large).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub emit_traces: Option<bool>,

    /// Worker threads for the repetition loop (0 = one per core).
    #[arg(long)]
    pub workers: Option<usize>,

    /// Config file of `key = value` lines; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Builds the effective configuration: defaults, then the config file (if
/// any), then explicit flags. The error string names the offending input.
pub fn build_config(cli: &Cli) -> Result<SimConfig, String> {
    let mut config = SimConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("config file {}: {e}", path.display()))?;
        apply_file(&mut config, &text)?;
    }
    if let Some(v) = cli.n_sim {
        config.n_sim = v;
    }
    if let Some(v) = cli.n_cases {
        config.n_cases = v;
    }
    if let Some(v) = cli.rho {
        config.rho = v;
    }
    if let Some(v) = &cli.p_miss {
        config.p_miss = v.clone();
    }
    if let Some(v) = &cli.checkpoints {
        config.checkpoints = v.clone();
    }
    if let Some(v) = cli.t_max {
        config.t_max = v;
    }
    if let Some(v) = cli.m {
        config.m = v;
    }
    if let Some(v) = cli.seed {
        config.seed = v;
    }
    if let Some(v) = &cli.out_dir {
        config.out_dir = v.clone();
    }
    if let Some(v) = cli.emit_traces {
        config.emit_traces = v;
    }
    if let Some(v) = cli.workers {
        config.workers = v;
    }
    Ok(config)
}

/// Applies `key = value` lines to a config. `#` starts a comment; blank
/// lines are skipped; unknown keys are errors.
pub fn apply_file(config: &mut SimConfig, text: &str) -> Result<(), String> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`, got `{raw}`", lineno + 1))?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| format!("line {}: invalid {what} `{value}`", lineno + 1);
        match key {
            "n_sim" => config.n_sim = value.parse().map_err(|_| bad("n_sim"))?,
            "n_cases" => config.n_cases = value.parse().map_err(|_| bad("n_cases"))?,
            "rho" => config.rho = value.parse().map_err(|_| bad("rho"))?,
            "p_miss" => {
                config.p_miss = value
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad("p_miss"))?
            }
            "checkpoints" => {
                config.checkpoints = value
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad("checkpoints"))?
            }
            "t_max" => config.t_max = value.parse().map_err(|_| bad("t_max"))?,
            "m" => config.m = value.parse().map_err(|_| bad("m"))?,
            "seed" => config.seed = value.parse().map_err(|_| bad("seed"))?,
            "out_dir" => config.out_dir = PathBuf::from(value),
            "emit_traces" => config.emit_traces = value.parse().map_err(|_| bad("emit_traces"))?,
            "workers" => config.workers = value.parse().map_err(|_| bad("workers"))?,
            other => return Err(format!("line {}: unknown key `{other}`", lineno + 1)),
        }
    }
    Ok(())
}

/// Renders a config in the file format, such that applying the result to any
/// base config reproduces `config` exactly.
pub fn render_config(config: &SimConfig) -> String {
    let join_f = |v: &[f64]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let join_u = |v: &[usize]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    format!(
        "n_sim = {}\nn_cases = {}\nrho = {}\np_miss = {}\ncheckpoints = {}\nt_max = {}\nm = {}\nseed = {}\nout_dir = {}\nemit_traces = {}\nworkers = {}\n",
        config.n_sim,
        config.n_cases,
        config.rho,
        join_f(&config.p_miss),
        join_u(&config.checkpoints),
        config.t_max,
        config.m,
        config.seed,
        config.out_dir.display(),
        config.emit_traces,
        config.workers,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_without_arguments() {
        let cli = Cli::parse_from(["iterimp"]);
        let config = build_config(&cli).unwrap();
        assert_eq!(config, SimConfig::default());
    }

    #[test]
    fn flags_override_defaults() {
        let cli = Cli::parse_from([
            "iterimp",
            "--p-miss",
            "0.05,0.95",
            "--n-sim",
            "50",
            "--seed",
            "7",
        ]);
        let config = build_config(&cli).unwrap();
        assert_eq!(config.p_miss, vec![0.05, 0.95]);
        assert_eq!(config.n_sim, 50);
        assert_eq!(config.seed, 7);
        // untouched fields keep their defaults
        assert_eq!(config.t_max, SimConfig::default().t_max);
    }

    #[test]
    fn out_of_range_values_fail_validation() {
        let cli = Cli::parse_from(["iterimp", "--p-miss", "1.5"]);
        let config = build_config(&cli).unwrap();
        assert!(config.validate().is_err());
    }

    #[test]
    fn render_parse_round_trip() {
        let config = SimConfig {
            n_sim: 17,
            n_cases: 93,
            rho: 0.35,
            p_miss: vec![0.1, 0.6],
            checkpoints: vec![1, 4, 9],
            t_max: 9,
            m: 3,
            seed: 99,
            workers: 2,
            emit_traces: true,
            out_dir: PathBuf::from("some/dir"),
        };
        let mut rebuilt = SimConfig::default();
        apply_file(&mut rebuilt, &render_config(&config)).unwrap();
        assert_eq!(rebuilt, config);
    }

    #[test]
    fn file_comments_and_unknown_keys() {
        let mut config = SimConfig::default();
        apply_file(
            &mut config,
            "# a comment\n\nn_sim = 5  # trailing comment\nm = 4\n",
        )
        .unwrap();
        assert_eq!(config.n_sim, 5);
        assert_eq!(config.m, 4);

        let err = apply_file(&mut config, "n_simulations = 5\n").unwrap_err();
        assert!(err.contains("unknown key"), "{err}");
        let err = apply_file(&mut config, "rho 0.5\n").unwrap_err();
        assert!(err.contains("key = value"), "{err}");
    }

    #[test]
    fn flag_beats_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "n_sim = 11\nseed = 3\n").unwrap();
        let cli = Cli::parse_from([
            "iterimp",
            "--config",
            path.to_str().unwrap(),
            "--n-sim",
            "22",
        ]);
        let config = build_config(&cli).unwrap();
        assert_eq!(config.n_sim, 22); // flag wins
        assert_eq!(config.seed, 3); // file beats default
    }

    #[test]
    fn emit_traces_flag_forms() {
        let on = build_config(&Cli::parse_from(["iterimp", "--emit-traces"])).unwrap();
        assert!(on.emit_traces);
        let off =
            build_config(&Cli::parse_from(["iterimp", "--emit-traces=false"])).unwrap();
        assert!(!off.emit_traces);
        let unset = build_config(&Cli::parse_from(["iterimp"])).unwrap();
        assert!(!unset.emit_traces);
    }
}
