//! Per-run summary statistics, their text form, and side-by-side comparison
//! of two runs as percentage error reductions.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::ReportError;
use crate::sim::TelemetryRow;
use crate::telemetry::{fmt_f64, PositionSample};
use crate::Vec3;

const AXES: [&str; 3] = ["x", "y", "z"];

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub controller: String,
    pub trajectory: String,
    pub t_end: f64,
    pub window_start: f64,
    /// Per-axis max |p − p_d| over the window.
    pub max_err: [f64; 3],
    /// Per-axis mean |p − p_d| over the window.
    pub mean_err: [f64; 3],
    pub rms_err: [f64; 3],
    pub event_count: u64,
    pub total_ticks: u64,
    pub transmission_ratio: f64,
    /// Shortest and mean spacing between transmissions; 0 with fewer than two.
    pub min_inter_event: f64,
    pub mean_inter_event: f64,
    pub final_v_s: f64,
    /// Wall-clock seconds; informational only.
    pub runtime_s: f64,
    pub reference: Option<ReferenceReduction>,
}

/// Reductions of this run's errors relative to a named reference run, in
/// percent. NaN where the reference error is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceReduction {
    pub name: String,
    pub mean_pct: [f64; 3],
    pub max_pct: [f64; 3],
}

impl ReferenceReduction {
    pub fn new(name: &str, reference: &MetricsReport, ours: &MetricsReport) -> Result<Self, ReportError> {
        let c = compare(reference, ours)?;
        let pick = |stat: &str| {
            let mut out = [f64::NAN; 3];
            for (j, r) in c.rows.iter().filter(|r| r.statistic == stat).enumerate() {
                out[j] = r.reduction_pct.unwrap_or(f64::NAN);
            }
            out
        };
        Ok(Self { name: name.to_string(), mean_pct: pick("mean"), max_pct: pick("max") })
    }
}

/// Streaming accumulator; rows must arrive in time order.
#[derive(Debug, Clone)]
pub struct MetricsAccumulator {
    window_start: f64,
    control_period: f64,
    n_window: u64,
    max_err: [f64; 3],
    sum_abs: [f64; 3],
    sum_sq: [f64; 3],
    ticks: u64,
    events: u64,
    last_event: Option<u64>,
    min_gap: u64,
    gap_sum: u64,
    last_v_s: f64,
}

impl MetricsAccumulator {
    /// Inter-event gaps are counted in rows, i.e. whole control periods.
    pub fn new(window_start: f64, control_period: f64) -> Self {
        Self {
            window_start,
            control_period,
            n_window: 0,
            max_err: [0.0; 3],
            sum_abs: [0.0; 3],
            sum_sq: [0.0; 3],
            ticks: 0,
            events: 0,
            last_event: None,
            min_gap: u64::MAX,
            gap_sum: 0,
            last_v_s: 0.0,
        }
    }

    fn push_sample(&mut self, t: f64, e: Vec3, event: bool) {
        let idx = self.ticks;
        self.ticks += 1;
        if event {
            self.events += 1;
            if let Some(last) = self.last_event {
                self.min_gap = self.min_gap.min(idx - last);
                self.gap_sum += idx - last;
            }
            self.last_event = Some(idx);
        }
        if t + 1e-9 >= self.window_start {
            self.n_window += 1;
            for j in 0..3 {
                let a = e[j].abs();
                self.max_err[j] = self.max_err[j].max(a);
                self.sum_abs[j] += a;
                self.sum_sq[j] += a * a;
            }
        }
    }

    pub fn push(&mut self, r: &TelemetryRow) {
        self.push_sample(r.t, r.p - r.p_d, r.event);
        self.last_v_s = r.v_s;
    }

    pub fn push_position(&mut self, s: &PositionSample) {
        self.push_sample(s.t, s.p - s.p_d, s.event);
    }

    pub fn set_final_v_s(&mut self, v: f64) {
        self.last_v_s = v;
    }

    pub fn finish(&self, controller: &str, trajectory: &str, t_end: f64, runtime_s: f64) -> MetricsReport {
        let n = self.n_window.max(1) as f64;
        let gaps = self.events.saturating_sub(1);
        MetricsReport {
            controller: controller.to_string(),
            trajectory: trajectory.to_string(),
            t_end,
            window_start: self.window_start,
            max_err: self.max_err,
            mean_err: self.sum_abs.map(|s| s / n),
            rms_err: self.sum_sq.map(|s| (s / n).sqrt()),
            event_count: self.events,
            total_ticks: self.ticks,
            transmission_ratio: if self.ticks == 0 { 0.0 } else { self.events as f64 / self.ticks as f64 },
            min_inter_event: if gaps == 0 { 0.0 } else { self.min_gap as f64 * self.control_period },
            mean_inter_event: if gaps == 0 { 0.0 } else { self.gap_sum as f64 * self.control_period / gaps as f64 },
            final_v_s: self.last_v_s,
            runtime_s,
            reference: None,
        }
    }
}

fn triple(v: &[f64; 3]) -> String {
    v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(", ")
}

impl MetricsReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "controller = {}", self.controller);
        let _ = writeln!(s, "trajectory = {}", self.trajectory);
        let _ = writeln!(s, "t_end = {}", fmt_f64(self.t_end));
        let _ = writeln!(s, "window_start = {}", fmt_f64(self.window_start));
        let _ = writeln!(s, "runtime_s = {}", fmt_f64(self.runtime_s));
        let _ = writeln!(s, "\n[tracking]");
        let _ = writeln!(s, "max_err = {}", triple(&self.max_err));
        let _ = writeln!(s, "mean_err = {}", triple(&self.mean_err));
        let _ = writeln!(s, "rms_err = {}", triple(&self.rms_err));
        let _ = writeln!(s, "\n[events]");
        let _ = writeln!(s, "event_count = {}", self.event_count);
        let _ = writeln!(s, "total_ticks = {}", self.total_ticks);
        let _ = writeln!(s, "transmission_ratio = {}", fmt_f64(self.transmission_ratio));
        let _ = writeln!(s, "min_inter_event = {}", fmt_f64(self.min_inter_event));
        let _ = writeln!(s, "mean_inter_event = {}", fmt_f64(self.mean_inter_event));
        let _ = writeln!(s, "\n[lyapunov]");
        let _ = writeln!(s, "final_v_s = {}", fmt_f64(self.final_v_s));
        if let Some(r) = &self.reference {
            let _ = writeln!(s, "\n[reference]");
            let _ = writeln!(s, "reference_name = {}", r.name);
            let _ = writeln!(s, "mean_reduction_pct = {}", triple(&r.mean_pct));
            let _ = writeln!(s, "max_reduction_pct = {}", triple(&r.max_pct));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, ReportError> {
        let mut kv = std::collections::HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() || (content.starts_with('[') && content.ends_with(']')) {
                continue;
            }
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| ReportError::Parse { line, msg: format!("expected `key = value`, got `{content}`") })?;
            if kv.insert(k.trim().to_string(), (line, v.trim().to_string())).is_some() {
                return Err(ReportError::Parse { line, msg: format!("duplicate key `{}`", k.trim()) });
            }
        }
        let get = |k: &'static str| kv.get(k).ok_or(ReportError::Missing(k));
        let num = |k: &'static str| -> Result<f64, ReportError> {
            let (line, v) = get(k)?;
            v.parse()
                .map_err(|_| ReportError::Parse { line: *line, msg: format!("`{k}`: expected a number, got `{v}`") })
        };
        let int = |k: &'static str| -> Result<u64, ReportError> {
            let (line, v) = get(k)?;
            v.parse()
                .map_err(|_| ReportError::Parse { line: *line, msg: format!("`{k}`: expected an integer, got `{v}`") })
        };
        let tri = |k: &'static str| -> Result<[f64; 3], ReportError> {
            let (line, v) = get(k)?;
            let xs: Vec<f64> = v
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| ReportError::Parse { line: *line, msg: format!("`{k}`: malformed number list") })?;
            xs.try_into().map_err(|_| ReportError::Parse { line: *line, msg: format!("`{k}`: expected 3 values") })
        };
        Ok(Self {
            controller: get("controller")?.1.clone(),
            trajectory: get("trajectory")?.1.clone(),
            t_end: num("t_end")?,
            window_start: num("window_start")?,
            max_err: tri("max_err")?,
            mean_err: tri("mean_err")?,
            rms_err: tri("rms_err")?,
            event_count: int("event_count")?,
            total_ticks: int("total_ticks")?,
            transmission_ratio: num("transmission_ratio")?,
            min_inter_event: num("min_inter_event")?,
            mean_inter_event: num("mean_inter_event")?,
            final_v_s: num("final_v_s")?,
            runtime_s: num("runtime_s")?,
            reference: match kv.get("reference_name") {
                Some((_, name)) => Some(ReferenceReduction {
                    name: name.clone(),
                    mean_pct: tri("mean_reduction_pct")?,
                    max_pct: tri("max_reduction_pct")?,
                }),
                None => None,
            },
        })
    }

    pub fn load(path: &Path) -> Result<Self, ReportError> {
        let text = std::fs::read_to_string(path).map_err(|source| ReportError::Io { path: path.to_owned(), source })?;
        Self::parse(&text)
    }
}

/// `(reference − ours) / reference` in percent, rounded to two decimals.
/// `None` when the reference error is zero.
pub fn reduction_pct(reference: f64, ours: f64) -> Option<f64> {
    if reference <= 0.0 {
        return None;
    }
    Some((100.0 * (reference - ours) / reference * 100.0).round() / 100.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisComparison {
    pub axis: &'static str,
    pub statistic: &'static str,
    pub reference: f64,
    pub ours: f64,
    pub reduction_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub reference_controller: String,
    pub controller: String,
    pub trajectory: String,
    pub rows: Vec<AxisComparison>,
    pub reference_ratio: f64,
    pub ratio: f64,
}

/// Compares `ours` against `reference`; both must cover the same trajectory,
/// horizon and statistics window.
pub fn compare(reference: &MetricsReport, ours: &MetricsReport) -> Result<Comparison, ReportError> {
    if reference.trajectory != ours.trajectory {
        return Err(ReportError::Mismatch(format!("trajectory `{}` vs `{}`", reference.trajectory, ours.trajectory)));
    }
    if reference.t_end != ours.t_end {
        return Err(ReportError::Mismatch(format!("t_end {} vs {}", reference.t_end, ours.t_end)));
    }
    if reference.window_start != ours.window_start {
        return Err(ReportError::Mismatch(format!("window_start {} vs {}", reference.window_start, ours.window_start)));
    }
    let mut rows = Vec::new();
    for (statistic, r, o) in [("mean", &reference.mean_err, &ours.mean_err), ("max", &reference.max_err, &ours.max_err)]
    {
        for j in 0..3 {
            rows.push(AxisComparison {
                axis: AXES[j],
                statistic,
                reference: r[j],
                ours: o[j],
                reduction_pct: reduction_pct(r[j], o[j]),
            });
        }
    }
    Ok(Comparison {
        reference_controller: reference.controller.clone(),
        controller: ours.controller.clone(),
        trajectory: ours.trajectory.clone(),
        rows,
        reference_ratio: reference.transmission_ratio,
        ratio: ours.transmission_ratio,
    })
}

fn pct(p: Option<f64>) -> String {
    p.map_or_else(|| "n/a".to_string(), |v| format!("{v:+.2}%"))
}

impl Comparison {
    /// Aligned table for people.
    pub fn render_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "trajectory: {}   reference: {}   compared: {}",
            self.trajectory, self.reference_controller, self.controller
        );
        let _ = writeln!(s, "{:<6} {:<5} {:>12} {:>12} {:>10}", "stat", "axis", "reference", "compared", "reduction");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<6} {:<5} {:>12.6} {:>12.6} {:>10}",
                r.statistic,
                r.axis,
                r.reference,
                r.ours,
                pct(r.reduction_pct)
            );
        }
        let _ = writeln!(s, "transmission ratio: {:.4} -> {:.4}", self.reference_ratio, self.ratio);
        s
    }

    /// One `key = value` line per cell, for scripts.
    pub fn render_machine(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{}_err_{}_reduction_pct = {}",
                r.statistic,
                r.axis,
                r.reduction_pct.map_or_else(|| "nan".to_string(), |v| format!("{v:.2}"))
            );
        }
        s
    }
}

/// Recomputes tracking and event statistics from telemetry text. `final_v_s`
/// and `runtime_s` are not recoverable from positions and are set to 0.
pub fn metrics_from_csv(
    text: &str,
    window_start: f64,
    control_period: f64,
    controller: &str,
    trajectory: &str,
    t_end: f64,
) -> Result<MetricsReport, String> {
    let samples = crate::telemetry::parse_positions(text)?;
    let mut acc = MetricsAccumulator::new(window_start, control_period);
    for s in &samples {
        acc.push_position(s);
    }
    Ok(acc.finish(controller, trajectory, t_end, 0.0))
}
