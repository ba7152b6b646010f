//! Error coordinates, the two virtual controls and the event-triggered input
//! with its dynamic threshold variable κ and zero-order hold.

use crate::cfilter::{CompGains, CompState, FilterState};
use crate::error::{MathError, SimError};
use crate::math::{frac_power, sgn, theta, DiagGain3, SwitchParams, Vec3};
use crate::plant::PlantState;
use crate::trajectory::TrajectorySample;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorCoords {
    pub x1: Vec3,
    pub x2: Vec3,
    pub y1: Vec3,
    pub y2: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CtrlGains {
    pub beta1: DiagGain3,
    pub gamma1: DiagGain3,
    pub beta2: DiagGain3,
    pub gamma2: DiagGain3,
    pub sw: SwitchParams,
}

impl Default for CtrlGains {
    fn default() -> Self {
        let g = |a, b, c| DiagGain3::new(a, b, c).expect("positive defaults");
        Self {
            beta1: g(1.0, 1.0, 1.2),
            gamma1: g(1.0, 1.0, 1.2),
            beta2: g(0.6, 0.6, 0.7),
            gamma2: g(1.0, 1.0, 1.2),
            sw: SwitchParams::new(0.75, 1e-4).expect("valid defaults"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriggerParams {
    /// Fixed part of the switching offset (m/s²).
    pub sigma: f64,
    pub delta: f64,
    pub kappa0: f64,
}

impl Default for TriggerParams {
    fn default() -> Self {
        Self { sigma: 0.05, delta: 0.1, kappa0: 0.0 }
    }
}

impl TriggerParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.sigma > 0.0) {
            return Err(format!("sigma must be positive, got {}", self.sigma));
        }
        if !(self.delta > 0.0) {
            return Err(format!("delta must be positive, got {}", self.delta));
        }
        if !(self.kappa0 >= 0.0 && self.kappa0.is_finite()) {
            return Err(format!("kappa0 must be non-negative, got {}", self.kappa0));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriggerState {
    pub kappa: f64,
    /// Command currently held by the actuator side.
    pub u_held: Vec3,
    /// `None` until the initial transmission.
    pub t_last_event: Option<f64>,
    pub event_count: u64,
}

impl TriggerState {
    pub fn new(tp: &TriggerParams) -> Self {
        Self { kappa: tp.kappa0, u_held: Vec3::zeros(), t_last_event: None, event_count: 0 }
    }

    /// Hold error `ẽ = u_held − ū`.
    pub fn hold_error(&self, bar_u: &Vec3) -> Vec3 {
        self.u_held - bar_u
    }
}

pub fn error_coords(plant: &PlantState, traj: &TrajectorySample, fs: &FilterState, cs: &CompState) -> ErrorCoords {
    let x1 = plant.p - traj.p_d;
    let x2 = plant.v - fs.chi;
    ErrorCoords { x1, x2, y1: x1 - cs.iota1, y2: x2 - cs.iota2 }
}

/// First virtual control (a velocity command).
pub fn alpha1(
    traj: &TrajectorySample,
    ec: &ErrorCoords,
    cs: &CompState,
    g: &CtrlGains,
    cg: &CompGains,
) -> Result<Vec3, MathError> {
    let i1 = &cs.iota1;
    let y1 = &ec.y1;
    Ok(traj.pd_dot
        - cg.c1.apply(i1) * i1.norm_squared()
        - cg.k.apply(i1)
        - cg.k1.apply(&theta(i1, &cg.sw)?)
        - g.beta1.apply(y1) * y1.norm_squared()
        - g.gamma1.apply(&theta(y1, &g.sw)?))
}

/// Second virtual control (an acceleration command). `xi` is the filter's
/// second state, i.e. the exact derivative of χ.
pub fn alpha2(xi: &Vec3, ec: &ErrorCoords, cs: &CompState, g: &CtrlGains, cg: &CompGains) -> Result<Vec3, MathError> {
    let i2 = &cs.iota2;
    let y2 = &ec.y2;
    let p = g.sw.p_exp();
    Ok(xi
        - ec.x1
        - cg.c2.apply(i2) * i2.norm_squared()
        - cg.k2.apply(&frac_power(i2, cg.sw.p_exp())?)
        - g.beta2.apply(y2) * y2.norm_squared()
        - g.gamma2.apply(&frac_power(y2, p)?))
}

/// Continuously updated command before the hold:
/// `ū = α₂ − (σ + κ/δ) sgn(y₂)`.
pub fn bar_u(alpha2: &Vec3, y2: &Vec3, kappa: f64, tp: &TriggerParams) -> Vec3 {
    alpha2 - sgn(y2) * (tp.sigma + kappa / tp.delta)
}

/// True iff `κ + δ(σ − |ẽⱼ|) < 0` for some axis.
pub fn trigger_fire(kappa: f64, e_tilde: &Vec3, tp: &TriggerParams) -> bool {
    e_tilde.iter().any(|e| kappa + tp.delta * (tp.sigma - e.abs()) < 0.0)
}

/// `κ̇ = −κ + maxⱼ(σ − |ẽⱼ|)`.
pub fn kappa_deriv(kappa: f64, e_tilde: &Vec3, tp: &TriggerParams) -> f64 {
    let best = e_tilde.iter().map(|e| tp.sigma - e.abs()).fold(f64::NEG_INFINITY, f64::max);
    -kappa + best
}

/// Transmits `bar_u_now` to the actuator at time `t`.
pub fn apply_event(ts: &TriggerState, bar_u_now: &Vec3, t: f64) -> Result<TriggerState, SimError> {
    if let Some(last) = ts.t_last_event {
        if t < last {
            return Err(SimError::EventOrder { t, last });
        }
    }
    Ok(TriggerState { kappa: ts.kappa, u_held: *bar_u_now, t_last_event: Some(t), event_count: ts.event_count + 1 })
}
