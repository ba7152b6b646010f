//! Normalized translational dynamics of the multirotor with a concrete
//! friction law and a bounded sinusoidal disturbance that lumps the arm
//! reaction and unmodelled forces together.

use crate::error::SimError;
use crate::math::Vec3;

const E3: Vec3 = Vec3::new(0.0, 0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantState {
    pub p: Vec3,
    pub v: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantParams {
    /// Total mass (kg).
    pub m_t: f64,
    pub g: f64,
    /// Per-axis viscous coefficients (N·s/m).
    pub visc: Vec3,
    /// Per-axis Coulomb magnitudes (N).
    pub coul: Vec3,
    /// Coulomb smoothing velocity (m/s).
    pub v_s: f64,
    pub dist_amp: Vec3,
    pub dist_freq: Vec3,
    pub dist_phase: Vec3,
    /// Certified bound on ‖Δ(t)‖.
    pub delta_bar: f64,
    /// Divergence detector: largest admissible ‖v‖ (m/s).
    pub v_limit: f64,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self {
            m_t: 4.85,
            g: 9.8,
            visc: Vec3::new(0.5, 0.5, 0.5),
            coul: Vec3::new(0.3, 0.3, 0.3),
            v_s: 0.05,
            dist_amp: Vec3::new(0.3, 0.3, 0.2),
            dist_freq: Vec3::new(1.0, 1.3, 0.7),
            dist_phase: Vec3::zeros(),
            delta_bar: 0.5,
            v_limit: 50.0,
        }
    }
}

impl PlantParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.m_t > 0.0) {
            return Err(format!("m_t must be positive, got {}", self.m_t));
        }
        if !(self.g > 0.0) {
            return Err(format!("g must be positive, got {}", self.g));
        }
        if !(self.v_s > 0.0) {
            return Err(format!("v_s must be positive, got {}", self.v_s));
        }
        if !(self.v_limit > 0.0) {
            return Err(format!("v_limit must be positive, got {}", self.v_limit));
        }
        if self.visc.iter().chain(self.coul.iter()).any(|c| !(*c >= 0.0)) {
            return Err("friction coefficients must be non-negative".into());
        }
        let amp = self.dist_amp.abs().norm();
        if amp > self.delta_bar {
            return Err(format!("disturbance amplitude norm {amp} exceeds delta_bar {}", self.delta_bar));
        }
        Ok(())
    }

    /// Global Lipschitz constant of [`friction_true`].
    pub fn friction_lipschitz(&self) -> f64 {
        (self.visc.max() + self.coul.max() / self.v_s) / self.m_t
    }
}

/// `f(v) = -(visc ⊙ v + coul ⊙ tanh(v / v_s)) / m_t`.
pub fn friction_true(v: &Vec3, params: &PlantParams) -> Vec3 {
    let force = v.component_mul(&params.visc) + params.coul.component_mul(&v.map(|c| (c / params.v_s).tanh()));
    -force / params.m_t
}

pub fn disturbance(t: f64, params: &PlantParams) -> Vec3 {
    Vec3::from_fn(|i, _| params.dist_amp[i] * (params.dist_freq[i] * t + params.dist_phase[i]).sin())
}

/// Returns `(ṗ, v̇)`.
pub fn plant_deriv(state: &PlantState, u: &Vec3, t: f64, params: &PlantParams) -> Result<(Vec3, Vec3), SimError> {
    let speed = state.v.norm();
    if !(speed <= params.v_limit) || !state.p.iter().all(|c| c.is_finite()) || !u.iter().all(|c| c.is_finite()) {
        return Err(SimError::Divergence {
            t,
            reason: format!("|v| = {speed} exceeds safety limit {}", params.v_limit),
            dump: format!("p = {:?}, v = {:?}, u = {:?}", state.p.as_slice(), state.v.as_slice(), u.as_slice()),
        });
    }
    let vdot = u + disturbance(t, params) + friction_true(&state.v, params);
    Ok((state.v, vdot))
}

/// Thrust force to normalized input: `u = U_c / m_t - g e₃`.
pub fn u_from_uc(uc: &Vec3, params: &PlantParams) -> Vec3 {
    uc / params.m_t - params.g * E3
}

/// Normalized input to thrust force: `U_c = m_t (u + g e₃)`.
pub fn uc_from_u(u: &Vec3, params: &PlantParams) -> Vec3 {
    params.m_t * (u + params.g * E3)
}
