//! CSV telemetry: one row per control tick with a fixed, versioned column
//! order, plus an optional decimated dump of the network weights.

use std::io::{self, Write};

use crate::nn::NNWeights;
use crate::sim::TelemetryRow;
use crate::Vec3;

/// Bumped whenever the column set or order changes.
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const CSV_COLUMNS: [&str; 22] = [
    "t", "p_x", "p_y", "p_z", "pd_x", "pd_y", "pd_z", "y1_x", "y1_y", "y1_z", "y2_x", "y2_y", "y2_z", "u_held_x",
    "u_held_y", "u_held_z", "kappa", "event", "V_s", "fhat_x", "fhat_y", "fhat_z",
];

/// Header line without the trailing newline.
pub fn csv_header() -> String {
    CSV_COLUMNS.join(",")
}

/// Shortest round-trip text for `x`, switching to exponent notation for very
/// small or very large magnitudes.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn push_vec(out: &mut String, v: &Vec3) {
    for c in v.iter() {
        out.push(',');
        out.push_str(&fmt_f64(*c));
    }
}

/// Formats one row. Floats use the shortest representation that parses back
/// to the same value, so the file is an exact record of the run.
pub fn format_row(r: &TelemetryRow) -> String {
    let mut s = fmt_f64(r.t);
    push_vec(&mut s, &r.p);
    push_vec(&mut s, &r.p_d);
    push_vec(&mut s, &r.y1);
    push_vec(&mut s, &r.y2);
    push_vec(&mut s, &r.u_held);
    s.push(',');
    s.push_str(&fmt_f64(r.kappa));
    s.push_str(if r.event { ",1" } else { ",0" });
    s.push(',');
    s.push_str(&fmt_f64(r.v_s));
    push_vec(&mut s, &r.fhat);
    s
}

pub struct CsvWriter<W: Write> {
    out: W,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W) -> io::Result<Self> {
        writeln!(out, "{}", csv_header())?;
        Ok(Self { out })
    }

    pub fn write_row(&mut self, r: &TelemetryRow) -> io::Result<()> {
        writeln!(self.out, "{}", format_row(r))
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// Position columns of one parsed telemetry row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionSample {
    pub t: f64,
    pub p: Vec3,
    pub p_d: Vec3,
    pub event: bool,
}

/// Reads `t`, `p`, `p_d` and the event flag back from telemetry text.
pub fn parse_positions(text: &str) -> Result<Vec<PositionSample>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty telemetry file")?;
    if header != csv_header() {
        return Err("unexpected telemetry header".into());
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != CSV_COLUMNS.len() {
                return Err(format!("row {}: expected {} fields, got {}", i + 2, CSV_COLUMNS.len(), f.len()));
            }
            let num = |k: usize| f[k].parse::<f64>().map_err(|e| format!("row {}: {e}", i + 2));
            Ok(PositionSample {
                t: num(0)?,
                p: Vec3::new(num(1)?, num(2)?, num(3)?),
                p_d: Vec3::new(num(4)?, num(5)?, num(6)?),
                event: f[17] == "1",
            })
        })
        .collect()
}

/// Header for the weight dump: `t`, then column-major `v0_r{i}c{j}`, `v1_r{i}c{j}`.
pub fn weights_header(w: &NNWeights) -> String {
    let mut cols = vec!["t".to_string()];
    for (name, m) in [("v0", &w.v0_hat), ("v1", &w.v1_hat)] {
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                cols.push(format!("{name}_r{i}c{j}"));
            }
        }
    }
    cols.join(",")
}

pub fn format_weights(t: f64, w: &NNWeights) -> String {
    let mut s = fmt_f64(t);
    for v in w.v0_hat.iter().chain(w.v1_hat.iter()) {
        s.push(',');
        s.push_str(&fmt_f64(*v));
    }
    s
}
