//! Fixed-dimension arithmetic shared by every other module: the smooth
//! switching map, the fractional-power direction map and a flat-state RK4
//! integrator.

use nalgebra::Vector3;

use crate::error::MathError;

/// World-frame 3-vector (position, velocity or acceleration depending on use).
pub type Vec3 = Vector3<f64>;

pub(crate) fn ensure_finite(s: &Vec3) -> Result<(), MathError> {
    if s.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(MathError::NonFinite)
    }
}

/// Positive-definite diagonal 3x3 gain matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagGain3([f64; 3]);

impl DiagGain3 {
    pub fn new(d1: f64, d2: f64, d3: f64) -> Result<Self, MathError> {
        let d = [d1, d2, d3];
        if d.iter().all(|x| x.is_finite() && *x > 0.0) {
            Ok(Self(d))
        } else {
            Err(MathError::NonPositiveGain(d))
        }
    }

    pub fn uniform(d: f64) -> Result<Self, MathError> {
        Self::new(d, d, d)
    }

    pub fn diag(&self) -> [f64; 3] {
        self.0
    }

    /// `diag(d) * v`.
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        Vec3::new(self.0[0] * v.x, self.0[1] * v.y, self.0[2] * v.z)
    }

    /// Induced 2-norm, which for a positive diagonal matrix is its largest entry.
    pub fn norm2(&self) -> f64 {
        self.0.iter().copied().fold(f64::MIN, f64::max)
    }
}

/// Exponent and threshold of the switching map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchParams {
    p_exp: f64,
    switch_eps: f64,
}

impl SwitchParams {
    pub fn new(p_exp: f64, switch_eps: f64) -> Result<Self, MathError> {
        if !(p_exp > 0.5 && p_exp < 1.0) {
            return Err(MathError::Exponent(p_exp));
        }
        if !(switch_eps > 0.0 && switch_eps.is_finite()) {
            return Err(MathError::SwitchThreshold(switch_eps));
        }
        Ok(Self { p_exp, switch_eps })
    }

    pub fn p_exp(&self) -> f64 {
        self.p_exp
    }

    pub fn switch_eps(&self) -> f64 {
        self.switch_eps
    }
}

/// `s / (sᵀs)^(1-p)`, extended by zero at the origin.
///
/// The magnitude of the result is `‖s‖^(2p-1)`, which vanishes at the origin
/// for `p > 1/2`.
pub fn frac_power(s: &Vec3, p_exp: f64) -> Result<Vec3, MathError> {
    ensure_finite(s)?;
    if !(p_exp > 0.5 && p_exp < 1.0) {
        return Err(MathError::Exponent(p_exp));
    }
    let sq = s.norm_squared();
    if sq == 0.0 {
        return Ok(Vec3::zeros());
    }
    Ok(s / sq.powf(1.0 - p_exp))
}

/// Smooth switching map.
///
/// Outside the ball `‖s‖² > ε` this is the plain fractional-power direction
/// `s/‖s‖^{2(1-p)}`; inside it is blended towards zero by
/// `sin²(‖s‖²π/(2ε))`, which equals 1 on the boundary. `Θ(0) = 0`.
pub fn theta(s: &Vec3, sp: &SwitchParams) -> Result<Vec3, MathError> {
    let dir = frac_power(s, sp.p_exp)?;
    let sq = s.norm_squared();
    if sq > sp.switch_eps {
        Ok(dir)
    } else {
        let w = (sq * std::f64::consts::PI / (2.0 * sp.switch_eps)).sin();
        Ok(dir * (w * w))
    }
}

/// Componentwise sign with `sgn(0) = 0`.
pub fn sgn(v: &Vec3) -> Vec3 {
    v.map(|c| {
        if c > 0.0 {
            1.0
        } else if c < 0.0 {
            -1.0
        } else {
            0.0
        }
    })
}

/// One classical fourth-order Runge–Kutta step over a flat state vector.
///
/// `deriv(t, x, dx)` writes the time derivative of `x` into `dx`. Any error
/// it returns aborts the step and is passed through unchanged.
pub fn rk4_step<F, E>(mut deriv: F, state: &[f64], t: f64, dt: f64) -> Result<Vec<f64>, E>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), E>,
{
    debug_assert!(dt > 0.0);
    let n = state.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    deriv(t, state, &mut k1)?;
    for i in 0..n {
        tmp[i] = state[i] + 0.5 * dt * k1[i];
    }
    deriv(t + 0.5 * dt, &tmp, &mut k2)?;
    for i in 0..n {
        tmp[i] = state[i] + 0.5 * dt * k2[i];
    }
    deriv(t + 0.5 * dt, &tmp, &mut k3)?;
    for i in 0..n {
        tmp[i] = state[i] + dt * k3[i];
    }
    deriv(t + dt, &tmp, &mut k4)?;

    Ok((0..n).map(|i| state[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect())
}
