//! Batch runs: one config in, telemetry CSV, weight dump, metrics file and
//! resolved config out. Sweeps fan independent configs out over a thread pool.

use std::collections::{HashSet, VecDeque};
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::config::{load_config, render_config, RunConfig};
use crate::error::{ConfigError, ReportError, SimError};
use crate::metrics::{MetricsAccumulator, MetricsReport, ReferenceReduction};
use crate::sim::{Monitors, Simulation};
use crate::telemetry::{format_row, format_weights, weights_header, CsvWriter};

pub const TELEMETRY_FILE: &str = "telemetry.csv";
pub const WEIGHTS_FILE: &str = "weights.csv";
pub const METRICS_FILE: &str = "metrics.txt";
pub const RESOLVED_CONFIG_FILE: &str = "config.resolved";
pub const DIVERGENCE_FILE: &str = "divergence.txt";

/// Rows kept for the divergence report.
const TAIL_ROWS: usize = 20;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("reference metrics: {0}")]
    Reference(#[from] ReportError),
    #[error("{source} (partial telemetry kept in {})", dir.display())]
    Diverged {
        #[source]
        source: SimError,
        dir: PathBuf,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl ExperimentError {
    /// Process exit status: 2 for bad input, 3 for divergence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) | ExperimentError::Reference(_) => 2,
            ExperimentError::Diverged { .. } => 3,
            ExperimentError::Io { .. } => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io { path: path.to_owned(), source }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: MetricsReport,
    pub monitors: Monitors,
    pub output_dir: PathBuf,
}

fn create(path: &Path) -> Result<BufWriter<File>, ExperimentError> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

/// Executes one run and writes its artifacts into `out_dir`.
pub fn run_experiment(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome, ExperimentError> {
    cfg.validate()?;
    let reference = match &cfg.reference_metrics {
        Some(path) => Some((path.display().to_string(), MetricsReport::load(path)?)),
        None => None,
    };
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let resolved = out_dir.join(RESOLVED_CONFIG_FILE);
    fs::write(&resolved, render_config(cfg)).map_err(io_err(&resolved))?;

    let mut sim = Simulation::new(cfg.closed_loop.clone()).map_err(ConfigError::Invalid)?;
    let csv_path = out_dir.join(TELEMETRY_FILE);
    let mut csv = CsvWriter::new(create(&csv_path)?).map_err(io_err(&csv_path))?;
    let weights_path = out_dir.join(WEIGHTS_FILE);
    let mut weights = if cfg.weights_decimation > 0 {
        let mut w = create(&weights_path)?;
        writeln!(w, "{}", weights_header(&sim.state().weights)).map_err(io_err(&weights_path))?;
        Some(w)
    } else {
        None
    };

    let started = Instant::now();
    let mut acc = MetricsAccumulator::new(cfg.window_start, cfg.closed_loop.sim.control_period);
    let mut tail: VecDeque<String> = VecDeque::with_capacity(TAIL_ROWS);
    while !sim.finished() {
        if let Some(w) = weights.as_mut() {
            if sim.ticks_done() % cfg.weights_decimation == 0 {
                writeln!(w, "{}", format_weights(sim.time(), &sim.state().weights)).map_err(io_err(&weights_path))?;
            }
        }
        match sim.step() {
            Ok(row) => {
                csv.write_row(&row).map_err(io_err(&csv_path))?;
                acc.push(&row);
                if tail.len() == TAIL_ROWS {
                    tail.pop_front();
                }
                tail.push_back(format_row(&row));
            }
            Err(err) => {
                csv.flush().map_err(io_err(&csv_path))?;
                if let Some(w) = weights.as_mut() {
                    w.flush().map_err(io_err(&weights_path))?;
                }
                write_divergence(out_dir, &err, &tail)?;
                log::info!("run diverged: {err}");
                return Err(ExperimentError::Diverged { source: err, dir: out_dir.to_owned() });
            }
        }
    }
    csv.flush().map_err(io_err(&csv_path))?;
    if let Some(w) = weights.as_mut() {
        w.flush().map_err(io_err(&weights_path))?;
    }
    let runtime = started.elapsed().as_secs_f64();

    let c = &cfg.closed_loop;
    let mut report = acc.finish(&c.mode.to_string(), &c.traj.kind.to_string(), c.sim.t_end, runtime);
    if let Some((name, reference)) = reference {
        report.reference = Some(ReferenceReduction::new(&name, &reference, &report)?);
    }
    let metrics_path = out_dir.join(METRICS_FILE);
    fs::write(&metrics_path, report.render()).map_err(io_err(&metrics_path))?;
    log::info!(
        "{} on {}: mean |e| = {:?}, {} events / {} ticks, {:.2} s",
        report.controller,
        report.trajectory,
        report.mean_err,
        report.event_count,
        report.total_ticks,
        runtime
    );
    Ok(RunOutcome { report, monitors: sim.monitors().clone(), output_dir: out_dir.to_owned() })
}

fn write_divergence(out_dir: &Path, err: &SimError, tail: &VecDeque<String>) -> Result<(), ExperimentError> {
    let path = out_dir.join(DIVERGENCE_FILE);
    let mut text = format!("error: {err}\n");
    if let SimError::Divergence { dump, .. } = err {
        text.push_str(&format!("state: {dump}\n"));
    }
    text.push_str(&format!("last {} rows:\n{}\n", tail.len(), crate::telemetry::csv_header()));
    for row in tail {
        text.push_str(row);
        text.push('\n');
    }
    fs::write(&path, text).map_err(io_err(&path))
}

/// Output directory for a config file: the config's own `output_dir`, else
/// `<base>/<file stem>`.
pub fn output_dir_for(cfg: &RunConfig, config_path: &Path, base: &Path) -> PathBuf {
    cfg.output_dir.clone().unwrap_or_else(|| {
        let stem = config_path.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());
        base.join(stem)
    })
}

#[derive(Debug)]
pub struct SweepEntry {
    pub config: PathBuf,
    pub result: Result<RunOutcome, ExperimentError>,
}

/// Expands `pattern`, loads every match and runs them concurrently. Configs
/// that fail to load are reported per entry; two configs resolving to the same
/// output directory are rejected up front.
pub fn sweep(pattern: &str, base: &Path) -> Result<Vec<SweepEntry>, ExperimentError> {
    let paths: Vec<PathBuf> = glob::glob(pattern)
        .map_err(|e| ConfigError::invalid(format!("bad glob `{pattern}`: {e}")))?
        .filter_map(Result::ok)
        .filter(|p| p.is_file())
        .collect();
    if paths.is_empty() {
        return Err(ConfigError::invalid(format!("no config files match `{pattern}`")).into());
    }

    type Loaded = (PathBuf, Result<(RunConfig, PathBuf), ExperimentError>);
    let loaded: Vec<Loaded> = paths
        .into_iter()
        .map(|p| {
            let r = load_config(&p).map(|cfg| {
                let dir = output_dir_for(&cfg, &p, base);
                (cfg, dir)
            });
            (p, r.map_err(ExperimentError::from))
        })
        .collect();

    let mut dirs = HashSet::new();
    for (p, r) in &loaded {
        if let Ok((_, dir)) = r {
            if !dirs.insert(dir.clone()) {
                return Err(ConfigError::invalid(format!(
                    "{}: output directory {} is shared with another config in the sweep",
                    p.display(),
                    dir.display()
                ))
                .into());
            }
        }
    }

    Ok(loaded
        .into_par_iter()
        .map(|(config, r)| {
            let result = r.and_then(|(cfg, dir)| run_experiment(&cfg, &dir));
            SweepEntry { config, result }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn exit_codes() {
        assert_eq!(ExperimentError::Config(ConfigError::invalid("x")).exit_code(), 2);
        let d = ExperimentError::Diverged {
            source: SimError::Divergence { t: 1.0, reason: "r".into(), dump: String::new() },
            dir: PathBuf::new(),
        };
        assert_eq!(d.exit_code(), 3);
    }

    #[test]
    fn output_dir_defaults_to_stem() {
        let cfg = parse_config("").unwrap();
        assert_eq!(
            output_dir_for(&cfg, Path::new("cfg/ellipse_et.conf"), Path::new("runs")),
            Path::new("runs/ellipse_et")
        );
        let cfg = parse_config("[run]\noutput_dir = elsewhere\n").unwrap();
        assert_eq!(output_dir_for(&cfg, Path::new("a.conf"), Path::new("runs")), Path::new("elsewhere"));
    }
}
