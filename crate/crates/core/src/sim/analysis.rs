//! Lyapunov surrogate and closed-form ultimate-bound / settling-time
//! calculators for user-supplied analysis constants.

use crate::cfilter::CompState;
use crate::controller::ErrorCoords;
use crate::error::BoundError;

/// `½(‖y₁‖² + ‖y₂‖² + ‖ι₁‖² + ‖ι₂‖²)`; the weight-error terms are left out
/// because the ideal weights are unknown at runtime.
pub fn lyapunov_surrogate(ec: &ErrorCoords, cs: &CompState) -> f64 {
    0.5 * (ec.y1.norm_squared() + ec.y2.norm_squared() + cs.iota1.norm_squared() + cs.iota2.norm_squared())
}

fn check(l: f64, m: f64, p_exp: f64, omega: f64) -> Result<(), BoundError> {
    if !(omega > 0.0 && omega < 1.0) {
        return Err(BoundError::Omega(omega));
    }
    if !(p_exp > 0.5 && p_exp < 1.0) {
        return Err(BoundError::Exponent(p_exp));
    }
    for (name, value) in [("l", l), ("m", m)] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(BoundError::NonPositive { name, value });
        }
    }
    Ok(())
}

/// Settling-time bound `1/(l ω (1−p)) + 1/(ω m)` for `V̇ ≤ −l V^p − m V² + n`.
pub fn settling_bound(l: f64, m: f64, p_exp: f64, omega: f64) -> Result<f64, BoundError> {
    check(l, m, p_exp, omega)?;
    Ok(1.0 / (l * omega * (1.0 - p_exp)) + 1.0 / (omega * m))
}

/// Residual bound `min{(n/((1−ω)l))^{1/p}, (n/((1−ω)m))^{1/2}}` on V.
pub fn value_bound(l: f64, m: f64, n: f64, p_exp: f64, omega: f64) -> Result<f64, BoundError> {
    check(l, m, p_exp, omega)?;
    if !(n > 0.0 && n.is_finite()) {
        return Err(BoundError::NonPositive { name: "n", value: n });
    }
    let a = (n / ((1.0 - omega) * l)).powf(1.0 / p_exp);
    let b = (n / ((1.0 - omega) * m)).sqrt();
    Ok(a.min(b))
}
