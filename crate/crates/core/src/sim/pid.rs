//! Time-triggered PID baseline with acceleration feedforward.

use crate::math::{DiagGain3, Vec3};
use crate::plant::PlantParams;
use crate::trajectory::TrajectorySample;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains {
    pub kp: DiagGain3,
    pub ki: DiagGain3,
    pub kd: DiagGain3,
    /// Per-axis clamp on |∫e₁|; `None` disables anti-windup.
    pub integral_limit: Option<f64>,
}

impl Default for PidGains {
    fn default() -> Self {
        let g = |a, b, c| DiagGain3::new(a, b, c).expect("positive defaults");
        Self { kp: g(8.0, 8.0, 10.0), ki: g(1.5, 1.5, 8.0), kd: g(10.0, 10.0, 13.0), integral_limit: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    pub integral: Vec3,
    /// Number of ticks at which the anti-windup clamp was active.
    pub clamp_count: u64,
}

/// `U_c = −K_p e₁ − K_i ∫e₁ − K_d ė₁ + m_t p̈_d` (N).
///
/// The integral is advanced by one rectangle `e₁·dt` before it is used. The
/// law has no gravity feedforward, so hover thrust builds up through the
/// integral term.
pub fn pid_control(
    e1: &Vec3,
    e1_dot: &Vec3,
    pid: &mut PidState,
    gains: &PidGains,
    traj: &TrajectorySample,
    params: &PlantParams,
    dt: f64,
) -> Vec3 {
    pid.integral += e1 * dt;
    if let Some(lim) = gains.integral_limit {
        let clamped = pid.integral.map(|c| c.clamp(-lim, lim));
        if clamped != pid.integral {
            pid.clamp_count += 1;
            log::debug!("PID integral clamped at {:?}", pid.integral.as_slice());
            pid.integral = clamped;
        }
    }
    -gains.kp.apply(e1) - gains.ki.apply(&pid.integral) - gains.kd.apply(e1_dot) + traj.pd_ddot * params.m_t
}
