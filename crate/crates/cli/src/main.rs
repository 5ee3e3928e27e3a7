use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use iterimp::diagnostics::DiagnosticThresholds;
use iterimp::harness::{run_simulation_with_progress, SimConfig, SimulationOutput};
use iterimp_cli::config::{build_config, Cli};
use iterimp_cli::output::emit_outputs;

fn main() -> ExitCode {
    // clap itself exits with status 2 on unparseable flags
    let cli = Cli::parse();

    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }

    let started_at = chrono::Utc::now().to_rfc3339();
    let result = run_simulation_with_progress(&config, |done, total| {
        eprint!("\rrep {done}/{total}");
        let _ = std::io::stderr().flush();
    });
    eprintln!();

    let output = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    match emit_outputs(&output, &config, &started_at) {
        Ok(_) => {
            print_report(&config, &output);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn print_report(config: &SimConfig, output: &SimulationOutput) {
    let thresholds = DiagnosticThresholds::default();
    println!(
        "theta_true = {:.6}; {} repetitions x {} conditions x {} checkpoints",
        output.theta_true,
        config.n_sim,
        config.p_miss.len(),
        config.checkpoints.len()
    );
    println!("p_miss      t  pct_bias  coverage  rhat_theta  ac_theta  flags");
    for s in &output.summaries {
        let mut flags = String::new();
        if s.rhat_theta_mean.is_some_and(|v| thresholds.flags_rhat(v)) {
            flags.push_str(" rhat>1.01");
        }
        if s.ac_theta_mean.is_some_and(|v| thresholds.flags_ac(v)) {
            flags.push_str(" ac>0.1");
        }
        let opt = |v: Option<f64>| match v {
            Some(x) => format!("{x:9.4}"),
            None => format!("{:>9}", "-"),
        };
        println!(
            "{:6.2} {:6}  {}  {}  {}  {} {}",
            s.p_miss,
            s.checkpoint,
            opt(s.pct_bias),
            opt(s.coverage),
            opt(s.rhat_theta_mean),
            opt(s.ac_theta_mean),
            flags
        );
    }
    match &output.correlations {
        Some(c) => println!(
            "diagnostic agreement between theta_hat and lambda1: spearman rho = {:.4} (ac, n={}), {:.4} (rhat, n={})",
            c.rho_ac, c.n_pairs_ac, c.rho_rhat, c.n_pairs_rhat
        ),
        None => println!("diagnostic agreement: undefined (too few defined pairs)"),
    }
    if !output.failures.is_empty() {
        println!("{} cell(s) failed; see manifest.json", output.failures.len());
    }
    println!(
        "wrote summary.csv, repetitions.csv{} and manifest.json to {}",
        if config.emit_traces { ", trace.csv" } else { "" },
        config.out_dir.display()
    );
}
