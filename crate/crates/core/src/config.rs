//! Run configuration in a flat `key = value` dialect grouped by `[section]`.
//!
//! ```text
//! # comments start with '#'
//! [gains]
//! beta2 = 0.6, 0.6, 0.7
//! p_exp = 0.75
//! [run]
//! controller = et_nn
//! ```
//!
//! Every key is optional; missing keys take the defaults shipped with the
//! crate (the experimental gain set). Unknown sections or keys, duplicates,
//! malformed values and range violations are rejected with the offending
//! line number.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::ConfigError;
use crate::math::{DiagGain3, SwitchParams, Vec3};
use crate::sim::ClosedLoopConfig;
use crate::telemetry::fmt_f64;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub closed_loop: ClosedLoopConfig,
    /// Where `run` writes its outputs; `None` lets the caller decide.
    pub output_dir: Option<PathBuf>,
    /// Start of the error-statistics window (s).
    pub window_start: f64,
    /// Write a weight snapshot every this many ticks; 0 disables the dump.
    pub weights_decimation: u64,
    /// Metrics file of a reference run to report reductions against.
    pub reference_metrics: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            closed_loop: ClosedLoopConfig::default(),
            output_dir: None,
            window_start: 5.0,
            weights_decimation: 0,
            reference_metrics: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.closed_loop.validate().map_err(ConfigError::Invalid)?;
        let t_end = self.closed_loop.sim.t_end;
        if !(self.window_start >= 0.0 && self.window_start < t_end) {
            return Err(ConfigError::invalid(format!(
                "window_start must lie in [0, t_end = {t_end}), got {}",
                self.window_start
            )));
        }
        Ok(())
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
    parse_config(&text)
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.parse().map_err(|_| ConfigError::at(line, format!("`{key}`: expected a number, got `{v}`")))?;
    if !x.is_finite() {
        return Err(ConfigError::at(line, format!("`{key}`: value must be finite")));
    }
    Ok(x)
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|s| parse_f64(line, key, s.trim())).collect()
}

fn parse_vec3(line: usize, key: &str, v: &str) -> Result<Vec3, ConfigError> {
    let xs = parse_list(line, key, v)?;
    if xs.len() != 3 {
        return Err(ConfigError::at(line, format!("`{key}`: expected 3 comma-separated numbers, got {}", xs.len())));
    }
    Ok(Vec3::new(xs[0], xs[1], xs[2]))
}

fn parse_gain(line: usize, key: &str, v: &str) -> Result<DiagGain3, ConfigError> {
    let d = parse_vec3(line, key, v)?;
    DiagGain3::new(d.x, d.y, d.z).map_err(|e| ConfigError::at(line, format!("`{key}`: {e}")))
}

fn parse_positive(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x = parse_f64(line, key, v)?;
    if x <= 0.0 {
        return Err(ConfigError::at(line, format!("`{key}` must be strictly positive, got {x}")));
    }
    Ok(x)
}

fn parse_uint(line: usize, key: &str, v: &str) -> Result<u64, ConfigError> {
    v.parse().map_err(|_| ConfigError::at(line, format!("`{key}`: expected a non-negative integer, got `{v}`")))
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut section: Option<String> = None;
    let mut seen = HashSet::new();
    let mut p_exp = (0usize, cfg.closed_loop.comp.sw.p_exp());
    let mut switch_eps = (0usize, cfg.closed_loop.comp.sw.switch_eps());
    let mut period_line = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name =
                name.strip_suffix(']').ok_or_else(|| ConfigError::at(line, "unterminated section header"))?.trim();
            const SECTIONS: [&str; 9] =
                ["plant", "filter", "gains", "trigger", "nn", "pid", "trajectory", "sim", "run"];
            if !SECTIONS.contains(&name) {
                return Err(ConfigError::at(line, format!("unknown section `[{name}]`")));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| ConfigError::at(line, format!("expected `key = value`, got `{content}`")))?;
        let sec = section
            .as_deref()
            .ok_or_else(|| ConfigError::at(line, format!("key `{key}` appears before any [section]")))?;
        if !seen.insert((sec.to_string(), key.to_string())) {
            return Err(ConfigError::at(line, format!("duplicate key `{key}` in [{sec}]")));
        }

        let c = &mut cfg.closed_loop;
        let unknown = || ConfigError::at(line, format!("unknown key `{key}` in [{sec}]"));
        match sec {
            "plant" => match key {
                "m_t" => c.plant.m_t = parse_positive(line, key, value)?,
                "g" => c.plant.g = parse_positive(line, key, value)?,
                "visc" => c.plant.visc = parse_vec3(line, key, value)?,
                "coul" => c.plant.coul = parse_vec3(line, key, value)?,
                "v_s" => c.plant.v_s = parse_positive(line, key, value)?,
                "dist_amp" => c.plant.dist_amp = parse_vec3(line, key, value)?,
                "dist_freq" => c.plant.dist_freq = parse_vec3(line, key, value)?,
                "dist_phase" => c.plant.dist_phase = parse_vec3(line, key, value)?,
                "delta_bar" => c.plant.delta_bar = parse_positive(line, key, value)?,
                "v_limit" => c.plant.v_limit = parse_positive(line, key, value)?,
                _ => return Err(unknown()),
            },
            "filter" => match key {
                "zeta" => c.filter.zeta = parse_positive(line, key, value)?,
                "rho" => c.filter.rho = parse_positive(line, key, value)?,
                "filt_eps" => c.filter.filt_eps = parse_positive(line, key, value)?,
                _ => return Err(unknown()),
            },
            "gains" => match key {
                "c1" => c.comp.c1 = parse_gain(line, key, value)?,
                "c2" => c.comp.c2 = parse_gain(line, key, value)?,
                "k" => c.comp.k = parse_gain(line, key, value)?,
                "k1" => c.comp.k1 = parse_gain(line, key, value)?,
                "k2" => c.comp.k2 = parse_gain(line, key, value)?,
                "beta1" => c.ctrl.beta1 = parse_gain(line, key, value)?,
                "gamma1" => c.ctrl.gamma1 = parse_gain(line, key, value)?,
                "beta2" => c.ctrl.beta2 = parse_gain(line, key, value)?,
                "gamma2" => c.ctrl.gamma2 = parse_gain(line, key, value)?,
                "p_exp" => {
                    let p = parse_f64(line, key, value)?;
                    if !(p > 0.5 && p < 1.0) {
                        return Err(ConfigError::at(line, format!("exponent must satisfy 0.5 < p < 1, got {p}")));
                    }
                    p_exp = (line, p);
                }
                "switch_eps" => switch_eps = (line, parse_positive(line, key, value)?),
                _ => return Err(unknown()),
            },
            "trigger" => match key {
                "sigma" => c.trigger.sigma = parse_positive(line, key, value)?,
                "delta" => c.trigger.delta = parse_positive(line, key, value)?,
                "kappa0" => {
                    let k = parse_f64(line, key, value)?;
                    if k < 0.0 {
                        return Err(ConfigError::at(line, format!("kappa0 must be non-negative, got {k}")));
                    }
                    c.trigger.kappa0 = k;
                }
                _ => return Err(unknown()),
            },
            "nn" => match key {
                "n0" => c.nn.n0 = parse_uint(line, key, value)? as usize,
                "n1" => {
                    let n1 = parse_uint(line, key, value)? as usize;
                    if n1 == 0 {
                        return Err(ConfigError::at(line, "hidden width n1 must be at least 1"));
                    }
                    if c.nn.gamma1.len() != n1 + 1 && !seen.contains(&("nn".to_string(), "gamma1".to_string())) {
                        let g = c.nn.gamma1.first().copied().unwrap_or(100.0);
                        c.nn.gamma1 = vec![g; n1 + 1];
                    }
                    c.nn.n1 = n1;
                }
                "n2" => c.nn.n2 = parse_uint(line, key, value)? as usize,
                "vbar0" => c.nn.vbar0 = parse_positive(line, key, value)?,
                "vbar1" => c.nn.vbar1 = parse_positive(line, key, value)?,
                "gamma0" => c.nn.gamma0 = parse_list(line, key, value)?,
                "gamma1" => c.nn.gamma1 = parse_list(line, key, value)?,
                "init_scale" => c.nn.init_scale = parse_f64(line, key, value)?,
                _ => return Err(unknown()),
            },
            "pid" => match key {
                "kp" => c.pid.kp = parse_gain(line, key, value)?,
                "ki" => c.pid.ki = parse_gain(line, key, value)?,
                "kd" => c.pid.kd = parse_gain(line, key, value)?,
                "integral_limit" => {
                    c.pid.integral_limit = if value == "none" { None } else { Some(parse_positive(line, key, value)?) }
                }
                _ => return Err(unknown()),
            },
            "trajectory" => match key {
                "kind" => c.traj.kind = value.parse().map_err(|e: String| ConfigError::at(line, e))?,
                "center" => c.traj.center = parse_vec3(line, key, value)?,
                "a" => c.traj.a = parse_f64(line, key, value)?,
                "b" => c.traj.b = parse_f64(line, key, value)?,
                "z_amp" => c.traj.z_amp = parse_f64(line, key, value)?,
                "omega" => c.traj.omega = parse_positive(line, key, value)?,
                "ramp" => c.traj.ramp = parse_positive(line, key, value)?,
                _ => return Err(unknown()),
            },
            "sim" => match key {
                "dt_plant" => c.sim.dt_plant = parse_positive(line, key, value)?,
                "control_period" => {
                    c.sim.control_period = parse_positive(line, key, value)?;
                    period_line = line;
                }
                "t_end" => c.sim.t_end = parse_positive(line, key, value)?,
                "seed" => c.sim.seed = parse_uint(line, key, value)?,
                "initial_offset" => c.sim.initial_offset = parse_vec3(line, key, value)?,
                "initial_velocity" => c.sim.initial_velocity = parse_vec3(line, key, value)?,
                _ => return Err(unknown()),
            },
            "run" => match key {
                "controller" => c.mode = value.parse().map_err(|e: String| ConfigError::at(line, e))?,
                "output_dir" => cfg.output_dir = Some(PathBuf::from(value)),
                "window_start" => {
                    let w = parse_f64(line, key, value)?;
                    if w < 0.0 {
                        return Err(ConfigError::at(line, format!("window_start must be non-negative, got {w}")));
                    }
                    cfg.window_start = w;
                }
                "weights_decimation" => cfg.weights_decimation = parse_uint(line, key, value)?,
                "reference_metrics" => cfg.reference_metrics = Some(PathBuf::from(value)),
                _ => return Err(unknown()),
            },
            _ => unreachable!("section names are checked on entry"),
        }
    }

    let sw = SwitchParams::new(p_exp.1, switch_eps.1)
        .map_err(|e| ConfigError::at(p_exp.0.max(switch_eps.0), e.to_string()))?;
    cfg.closed_loop.comp.sw = sw;
    cfg.closed_loop.ctrl.sw = sw;

    if let Err(msg) = cfg.closed_loop.sim.validate() {
        return Err(if period_line > 0 { ConfigError::at(period_line, msg) } else { ConfigError::Invalid(msg) });
    }
    cfg.validate()?;
    Ok(cfg)
}

fn vec3_str(v: &Vec3) -> String {
    v.iter().map(|c| fmt_f64(*c)).collect::<Vec<_>>().join(", ")
}

fn gain_str(g: &DiagGain3) -> String {
    g.diag().iter().map(|c| fmt_f64(*c)).collect::<Vec<_>>().join(", ")
}

fn list_str(v: &[f64]) -> String {
    v.iter().map(|c| fmt_f64(*c)).collect::<Vec<_>>().join(", ")
}

/// Resolved configuration in the same dialect; parsing it back yields an
/// identical [`RunConfig`].
pub fn render_config(cfg: &RunConfig) -> String {
    let c = &cfg.closed_loop;
    let mut s = String::new();
    let _ = writeln!(s, "[plant]");
    let _ = writeln!(s, "m_t = {}", fmt_f64(c.plant.m_t));
    let _ = writeln!(s, "g = {}", fmt_f64(c.plant.g));
    let _ = writeln!(s, "visc = {}", vec3_str(&c.plant.visc));
    let _ = writeln!(s, "coul = {}", vec3_str(&c.plant.coul));
    let _ = writeln!(s, "v_s = {}", fmt_f64(c.plant.v_s));
    let _ = writeln!(s, "dist_amp = {}", vec3_str(&c.plant.dist_amp));
    let _ = writeln!(s, "dist_freq = {}", vec3_str(&c.plant.dist_freq));
    let _ = writeln!(s, "dist_phase = {}", vec3_str(&c.plant.dist_phase));
    let _ = writeln!(s, "delta_bar = {}", fmt_f64(c.plant.delta_bar));
    let _ = writeln!(s, "v_limit = {}", fmt_f64(c.plant.v_limit));

    let _ = writeln!(s, "\n[filter]");
    let _ = writeln!(s, "zeta = {}", fmt_f64(c.filter.zeta));
    let _ = writeln!(s, "rho = {}", fmt_f64(c.filter.rho));
    let _ = writeln!(s, "filt_eps = {}", fmt_f64(c.filter.filt_eps));

    let _ = writeln!(s, "\n[gains]");
    for (name, g) in [
        ("c1", &c.comp.c1),
        ("c2", &c.comp.c2),
        ("k", &c.comp.k),
        ("k1", &c.comp.k1),
        ("k2", &c.comp.k2),
        ("beta1", &c.ctrl.beta1),
        ("gamma1", &c.ctrl.gamma1),
        ("beta2", &c.ctrl.beta2),
        ("gamma2", &c.ctrl.gamma2),
    ] {
        let _ = writeln!(s, "{name} = {}", gain_str(g));
    }
    let _ = writeln!(s, "p_exp = {}", fmt_f64(c.comp.sw.p_exp()));
    let _ = writeln!(s, "switch_eps = {}", fmt_f64(c.comp.sw.switch_eps()));

    let _ = writeln!(s, "\n[trigger]");
    let _ = writeln!(s, "sigma = {}", fmt_f64(c.trigger.sigma));
    let _ = writeln!(s, "delta = {}", fmt_f64(c.trigger.delta));
    let _ = writeln!(s, "kappa0 = {}", fmt_f64(c.trigger.kappa0));

    let _ = writeln!(s, "\n[nn]");
    let _ = writeln!(s, "n0 = {}", c.nn.n0);
    let _ = writeln!(s, "n1 = {}", c.nn.n1);
    let _ = writeln!(s, "n2 = {}", c.nn.n2);
    let _ = writeln!(s, "vbar0 = {}", fmt_f64(c.nn.vbar0));
    let _ = writeln!(s, "vbar1 = {}", fmt_f64(c.nn.vbar1));
    let _ = writeln!(s, "gamma0 = {}", list_str(&c.nn.gamma0));
    let _ = writeln!(s, "gamma1 = {}", list_str(&c.nn.gamma1));
    let _ = writeln!(s, "init_scale = {}", fmt_f64(c.nn.init_scale));

    let _ = writeln!(s, "\n[pid]");
    let _ = writeln!(s, "kp = {}", gain_str(&c.pid.kp));
    let _ = writeln!(s, "ki = {}", gain_str(&c.pid.ki));
    let _ = writeln!(s, "kd = {}", gain_str(&c.pid.kd));
    let _ = writeln!(s, "integral_limit = {}", c.pid.integral_limit.map_or_else(|| "none".to_string(), fmt_f64));

    let _ = writeln!(s, "\n[trajectory]");
    let _ = writeln!(s, "kind = {}", c.traj.kind);
    let _ = writeln!(s, "center = {}", vec3_str(&c.traj.center));
    let _ = writeln!(s, "a = {}", fmt_f64(c.traj.a));
    let _ = writeln!(s, "b = {}", fmt_f64(c.traj.b));
    let _ = writeln!(s, "z_amp = {}", fmt_f64(c.traj.z_amp));
    let _ = writeln!(s, "omega = {}", fmt_f64(c.traj.omega));
    let _ = writeln!(s, "ramp = {}", fmt_f64(c.traj.ramp));

    let _ = writeln!(s, "\n[sim]");
    let _ = writeln!(s, "dt_plant = {}", fmt_f64(c.sim.dt_plant));
    let _ = writeln!(s, "control_period = {}", fmt_f64(c.sim.control_period));
    let _ = writeln!(s, "t_end = {}", fmt_f64(c.sim.t_end));
    let _ = writeln!(s, "seed = {}", c.sim.seed);
    let _ = writeln!(s, "initial_offset = {}", vec3_str(&c.sim.initial_offset));
    let _ = writeln!(s, "initial_velocity = {}", vec3_str(&c.sim.initial_velocity));

    let _ = writeln!(s, "\n[run]");
    let _ = writeln!(s, "controller = {}", c.mode);
    if let Some(dir) = &cfg.output_dir {
        let _ = writeln!(s, "output_dir = {}", dir.display());
    }
    let _ = writeln!(s, "window_start = {}", fmt_f64(cfg.window_start));
    let _ = writeln!(s, "weights_decimation = {}", cfg.weights_decimation);
    if let Some(r) = &cfg.reference_metrics {
        let _ = writeln!(s, "reference_metrics = {}", r.display());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::ControllerMode;
    use crate::trajectory::TrajectoryKind;

    #[test]
    fn empty_file_gives_experimental_defaults() {
        let cfg = parse_config("").unwrap();
        let c = &cfg.closed_loop;
        assert_eq!(c.ctrl.beta2.diag(), [0.6, 0.6, 0.7]);
        assert_eq!(c.ctrl.beta1.diag(), [1.0, 1.0, 1.2]);
        assert_eq!(c.ctrl.gamma1.diag(), [1.0, 1.0, 1.2]);
        assert_eq!(c.ctrl.gamma2.diag(), [1.0, 1.0, 1.2]);
        assert_eq!(c.comp.c1.diag(), [1.0, 1.0, 1.2]);
        assert_eq!(c.comp.c2.diag(), [1.0, 1.0, 1.2]);
        assert_eq!(c.comp.k1.diag(), [1.0, 1.0, 1.2]);
        assert_eq!(c.comp.k2.diag(), [0.8, 0.8, 1.2]);
        assert_eq!(c.comp.k.diag(), [3.0, 3.0, 4.0]);
        assert_eq!((c.comp.sw.p_exp(), c.comp.sw.switch_eps()), (0.75, 1e-4));
        assert_eq!((c.filter.filt_eps, c.filter.zeta, c.filter.rho), (0.05, 0.5, 2.0));
        assert_eq!((c.trigger.sigma, c.trigger.delta), (0.05, 0.1));
        assert_eq!((c.nn.n0, c.nn.n1, c.nn.n2), (3, 4, 3));
        assert_eq!(c.nn.gamma0, vec![100.0; 4]);
        assert_eq!(c.nn.gamma1, vec![100.0; 5]);
        assert_eq!((c.plant.m_t, c.plant.g), (4.85, 9.8));
        assert_eq!(c.pid.kp.diag(), [8.0, 8.0, 10.0]);
        assert_eq!(c.pid.ki.diag(), [1.5, 1.5, 8.0]);
        assert_eq!(c.pid.kd.diag(), [10.0, 10.0, 13.0]);
        assert_eq!((c.sim.dt_plant, c.sim.control_period), (1e-3, 0.01));
        assert_eq!(c.mode, ControllerMode::EtNn);
        assert_eq!(cfg.window_start, 5.0);
    }

    #[test]
    fn parses_sections_and_comments() {
        let cfg = parse_config(
            "# experiment 2\n[trajectory]\nkind = figure_eight  # lissajous\na = 1.2\n\n[run]\ncontroller = baseline_pid\n[gains]\nbeta2 = 0.9, 0.9, 1.0\n",
        )
        .unwrap();
        assert_eq!(cfg.closed_loop.traj.kind, TrajectoryKind::FigureEight);
        assert_eq!(cfg.closed_loop.traj.a, 1.2);
        assert_eq!(cfg.closed_loop.mode, ControllerMode::BaselinePid);
        assert_eq!(cfg.closed_loop.ctrl.beta2.diag(), [0.9, 0.9, 1.0]);
    }

    fn line_of(err: ConfigError) -> (usize, String) {
        match err {
            ConfigError::Line { line, msg } => (line, msg),
            other => panic!("expected a line diagnostic, got {other:?}"),
        }
    }

    #[test]
    fn exponent_out_of_range() {
        let (line, msg) = line_of(parse_config("[gains]\n\np_exp = 1.2\n").unwrap_err());
        assert_eq!(line, 3);
        assert!(msg.contains("exponent must satisfy 0.5 < p < 1"), "{msg}");
    }

    #[test]
    fn non_integer_control_period() {
        let (line, msg) = line_of(parse_config("[sim]\ndt_plant = 0.001\ncontrol_period = 0.0097\n").unwrap_err());
        assert_eq!(line, 3);
        assert!(msg.contains("integer multiple"), "{msg}");
    }

    #[test]
    fn unknown_keys_and_sections() {
        let (line, msg) = line_of(parse_config("[plant]\nm_t = 5\nmass = 3\n").unwrap_err());
        assert_eq!(line, 3);
        assert!(msg.contains("unknown key `mass`"));
        let (line, _) = line_of(parse_config("[motors]\n").unwrap_err());
        assert_eq!(line, 1);
        let (line, _) = line_of(parse_config("m_t = 5\n").unwrap_err());
        assert_eq!(line, 1);
    }

    #[test]
    fn type_errors_and_duplicates() {
        let (line, msg) = line_of(parse_config("[trigger]\nsigma = fast\n").unwrap_err());
        assert_eq!(line, 2);
        assert!(msg.contains("expected a number"));
        let (line, _) = line_of(parse_config("[gains]\nk = 1, 2\n").unwrap_err());
        assert_eq!(line, 2);
        let (line, _) = line_of(parse_config("[gains]\nk = 1, -2, 3\n").unwrap_err());
        assert_eq!(line, 2);
        let (line, _) = line_of(parse_config("[sim]\nseed = 1\nseed = 2\n").unwrap_err());
        assert_eq!(line, 3);
        let (line, _) = line_of(parse_config("[run]\ncontroller = lqr\n").unwrap_err());
        assert_eq!(line, 2);
    }

    #[test]
    fn cross_field_violations() {
        assert!(matches!(parse_config("[plant]\ndist_amp = 1, 1, 1\n"), Err(ConfigError::Invalid(_))));
        assert!(matches!(parse_config("[nn]\ngamma1 = 1, 1\n"), Err(ConfigError::Invalid(_))));
        assert!(matches!(parse_config("[run]\nwindow_start = 100\n"), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn hidden_width_resizes_default_gains() {
        let cfg = parse_config("[nn]\nn1 = 6\n").unwrap();
        assert_eq!(cfg.closed_loop.nn.gamma1.len(), 7);
    }

    #[test]
    fn resolved_echo_reloads_identically() {
        let text = "[trajectory]\nkind = figure_eight\nomega = 0.45\n[sim]\nseed = 99\ninitial_offset = 0.3, -0.1, 1e-7\n[pid]\nintegral_limit = 2.5\n[run]\noutput_dir = out/x\nreference_metrics = ref.txt\nweights_decimation = 10\n";
        let cfg = parse_config(text).unwrap();
        let echo = render_config(&cfg);
        assert_eq!(parse_config(&echo).unwrap(), cfg);
        let defaults = RunConfig::default();
        assert_eq!(parse_config(&render_config(&defaults)).unwrap(), defaults);
    }
}
