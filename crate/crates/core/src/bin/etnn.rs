use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use etnn_core::config::{load_config, render_config, RunConfig};
use etnn_core::experiment::{output_dir_for, run_experiment, sweep};
use etnn_core::metrics::{compare, MetricsReport};
use etnn_core::sim::{settling_bound, value_bound};

#[derive(Parser)]
#[command(name = "etnn", version, about = "Event-triggered neural backstepping simulator and experiment harness")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one closed-loop experiment.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-axis error reductions of run B relative to reference run A.
    Compare {
        metrics_a: PathBuf,
        metrics_b: PathBuf,
        /// Emit `key = value` lines instead of the table.
        #[arg(long)]
        machine: bool,
    },
    /// Run every config matching a glob pattern, in parallel.
    Sweep {
        config_glob: String,
        /// Parent directory for runs that do not set `output_dir`.
        #[arg(long, default_value = "runs")]
        base: PathBuf,
    },
    /// Settling-time and residual bounds for user-supplied analysis constants.
    Bound {
        #[arg(long)]
        l: f64,
        #[arg(long)]
        m: f64,
        /// Residual constant; enables the value bound.
        #[arg(long)]
        n: Option<f64>,
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        p: f64,
    },
    /// Print the default configuration.
    Defaults,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    ExitCode::from(match cli.cmd {
        Cmd::Run { config, out } => cmd_run(&config, out),
        Cmd::Compare { metrics_a, metrics_b, machine } => cmd_compare(&metrics_a, &metrics_b, machine),
        Cmd::Sweep { config_glob, base } => cmd_sweep(&config_glob, &base),
        Cmd::Bound { l, m, n, omega, p } => cmd_bound(l, m, n, omega, p),
        Cmd::Defaults => {
            print!("{}", render_config(&RunConfig::default()));
            0
        }
    })
}

fn cmd_run(config: &Path, out: Option<PathBuf>) -> u8 {
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", config.display());
            return 2;
        }
    };
    let dir = out.unwrap_or_else(|| output_dir_for(&cfg, config, Path::new("runs")));
    match run_experiment(&cfg, &dir) {
        Ok(outcome) => {
            print!("{}", outcome.report.render());
            println!("# outputs in {}", outcome.output_dir.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code() as u8
        }
    }
}

fn cmd_compare(a: &Path, b: &Path, machine: bool) -> u8 {
    let load = |p: &Path| MetricsReport::load(p).map_err(|e| eprintln!("error: {}: {e}", p.display()));
    let (Ok(ra), Ok(rb)) = (load(a), load(b)) else {
        return 2;
    };
    match compare(&ra, &rb) {
        Ok(c) => {
            print!("{}", if machine { c.render_machine() } else { c.render_table() });
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn cmd_sweep(pattern: &str, base: &Path) -> u8 {
    let entries = match sweep(pattern, base) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code() as u8;
        }
    };
    let mut code = 0u8;
    for entry in &entries {
        match &entry.result {
            Ok(o) => {
                let r = &o.report;
                println!(
                    "ok    {}  {} {}  mean |e| = {:.4}, {:.4}, {:.4}  ratio = {:.3}  -> {}",
                    entry.config.display(),
                    r.controller,
                    r.trajectory,
                    r.mean_err[0],
                    r.mean_err[1],
                    r.mean_err[2],
                    r.transmission_ratio,
                    o.output_dir.display()
                );
            }
            Err(e) => {
                println!("fail  {}  {e}", entry.config.display());
                code = code.max(e.exit_code() as u8);
            }
        }
    }
    code
}

fn cmd_bound(l: f64, m: f64, n: Option<f64>, omega: f64, p: f64) -> u8 {
    match settling_bound(l, m, p, omega) {
        Ok(t) => println!("T ≤ {t}"),
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    }
    if let Some(n) = n {
        match value_bound(l, m, n, p, omega) {
            Ok(v) => println!("V ≤ {v}"),
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        }
    }
    0
}
