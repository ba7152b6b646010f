//! Reference trajectories with analytic derivatives up to third order.

use std::fmt;
use std::str::FromStr;

use crate::math::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub p_d: Vec3,
    pub pd_dot: Vec3,
    pub pd_ddot: Vec3,
    pub pd_dddot: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrajectoryKind {
    Ellipse,
    FigureEight,
    Setpoint,
}

impl fmt::Display for TrajectoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrajectoryKind::Ellipse => "ellipse",
            TrajectoryKind::FigureEight => "figure_eight",
            TrajectoryKind::Setpoint => "setpoint",
        })
    }
}

impl FromStr for TrajectoryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ellipse" => Ok(TrajectoryKind::Ellipse),
            "figure_eight" => Ok(TrajectoryKind::FigureEight),
            "setpoint" => Ok(TrajectoryKind::Setpoint),
            other => Err(format!("unknown trajectory kind `{other}` (ellipse | figure_eight | setpoint)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySpec {
    pub kind: TrajectoryKind,
    pub center: Vec3,
    /// Semi-axis along x (m).
    pub a: f64,
    /// Semi-axis along y (m).
    pub b: f64,
    /// Amplitude of the optional altitude sinusoid (m).
    pub z_amp: f64,
    /// Angular rate (rad/s).
    pub omega: f64,
    /// Duration of the smooth start (s).
    pub ramp: f64,
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        Self {
            kind: TrajectoryKind::Ellipse,
            center: Vec3::new(0.0, 0.0, 1.0),
            a: 1.0,
            b: 0.6,
            z_amp: 0.0,
            omega: 0.5,
            ramp: 3.0,
        }
    }
}

impl TrajectorySpec {
    pub fn validate(&self) -> Result<(), String> {
        if self.kind != TrajectoryKind::Setpoint && !(self.omega > 0.0) {
            return Err(format!("omega must be positive for periodic trajectories, got {}", self.omega));
        }
        if !(self.ramp > 0.0) {
            return Err(format!("ramp duration must be positive, got {}", self.ramp));
        }
        if !(self.a.is_finite() && self.b.is_finite() && self.z_amp.is_finite()) {
            return Err("trajectory amplitudes must be finite".into());
        }
        Ok(())
    }
}

/// Quintic smooth-start `r(τ) = τ³(10 − 15τ + 6τ²)` and its first three time
/// derivatives.
fn ramp(t: f64, duration: f64) -> [f64; 4] {
    if t >= duration {
        return [1.0, 0.0, 0.0, 0.0];
    }
    let tau = (t / duration).max(0.0);
    let d = duration;
    [
        tau.powi(3) * (10.0 - 15.0 * tau + 6.0 * tau * tau),
        30.0 * tau * tau * (1.0 - tau).powi(2) / d,
        60.0 * tau * (1.0 - tau) * (1.0 - 2.0 * tau) / (d * d),
        60.0 * (1.0 - 6.0 * tau + 6.0 * tau * tau) / (d * d * d),
    ]
}

/// Shape offset and its first three derivatives, before the ramp.
fn shape(spec: &TrajectorySpec, t: f64) -> [Vec3; 4] {
    let w = spec.omega;
    let (a, b, h) = (spec.a, spec.b, spec.z_amp);
    let (s1, c1) = (w * t).sin_cos();
    match spec.kind {
        TrajectoryKind::Setpoint => [Vec3::zeros(); 4],
        TrajectoryKind::Ellipse => {
            let s = Vec3::new(a * c1, b * s1, h * s1);
            let ds = Vec3::new(-a * s1, b * c1, h * c1) * w;
            [s, ds, -s * (w * w), -ds * (w * w)]
        }
        TrajectoryKind::FigureEight => {
            let (s2, c2) = (2.0 * w * t).sin_cos();
            let w2 = w * w;
            [
                Vec3::new(a * s1, b * s2, h * s1),
                Vec3::new(a * w * c1, 2.0 * b * w * c2, h * w * c1),
                Vec3::new(-a * w2 * s1, -4.0 * b * w2 * s2, -h * w2 * s1),
                Vec3::new(-a * w2 * w * c1, -8.0 * b * w2 * w * c2, -h * w2 * w * c1),
            ]
        }
    }
}

pub fn traj_sample(spec: &TrajectorySpec, t: f64) -> TrajectorySample {
    let [r, r1, r2, r3] = ramp(t, spec.ramp);
    let [s, s1, s2, s3] = shape(spec, t);
    TrajectorySample {
        p_d: spec.center + s * r,
        pd_dot: s * r1 + s1 * r,
        pd_ddot: s * r2 + s1 * (2.0 * r1) + s2 * r,
        pd_dddot: s * r3 + s1 * (3.0 * r2) + s2 * (3.0 * r1) + s3 * r,
    }
}
