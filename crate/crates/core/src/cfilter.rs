//! Second-order command filter that smooths the first virtual control, and
//! the compensation system that absorbs the filter-induced mismatch.

use crate::error::MathError;
use crate::math::{frac_power, theta, DiagGain3, SwitchParams, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterState {
    pub chi: Vec3,
    pub xi: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    pub zeta: f64,
    pub rho: f64,
    /// Filter time scale.
    pub filt_eps: f64,
}

/// Shipped defaults keep ζ = 0.5 but use a faster, better damped time scale
/// than [`FilterParams::published`]: the loop through α₁ only stays stable
/// when `rho / filt_eps` exceeds the effective ι₁ gain of α₁.
impl Default for FilterParams {
    fn default() -> Self {
        Self { zeta: 0.5, rho: 2.0, filt_eps: 0.05 }
    }
}

impl FilterParams {
    /// ζ = 0.5, ρ = 0.1, ε = 0.3 as listed for the experimental platform.
    pub fn published() -> Self {
        Self { zeta: 0.5, rho: 0.1, filt_eps: 0.3 }
    }

    /// Small-signal damping rate `rho / filt_eps` of the filter velocity.
    /// Linearizing the ι₁–filter loop with α₁ gain K gives
    /// `s³ + (ρ/ε)s² + (ζ/ε²)s + Kζ/ε²`, stable iff `ρ/ε > K`.
    pub fn damping_rate(&self) -> f64 {
        self.rho / self.filt_eps
    }

    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [("zeta", self.zeta), ("rho", self.rho), ("filt_eps", self.filt_eps)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be strictly positive, got {v}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CompState {
    pub iota1: Vec3,
    pub iota2: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompGains {
    pub c1: DiagGain3,
    pub c2: DiagGain3,
    pub k: DiagGain3,
    pub k1: DiagGain3,
    pub k2: DiagGain3,
    pub sw: SwitchParams,
}

impl Default for CompGains {
    fn default() -> Self {
        let g = |a, b, c| DiagGain3::new(a, b, c).expect("positive defaults");
        Self {
            c1: g(1.0, 1.0, 1.2),
            c2: g(1.0, 1.0, 1.2),
            k: g(3.0, 3.0, 4.0),
            k1: g(1.0, 1.0, 1.2),
            k2: g(0.8, 0.8, 1.2),
            sw: SwitchParams::new(0.75, 1e-4).expect("valid defaults"),
        }
    }
}

pub fn filter_init(alpha1_0: &Vec3) -> FilterState {
    FilterState { chi: *alpha1_0, xi: Vec3::zeros() }
}

/// Returns `(χ̇, ξ̇)`.
pub fn filter_deriv(fs: &FilterState, alpha1: &Vec3, fp: &FilterParams) -> (Vec3, Vec3) {
    let eps = fp.filt_eps;
    let track = (fs.chi - alpha1).map(f64::atan);
    let damp = (fs.xi * eps).map(f64::atan);
    (fs.xi, (-fp.zeta * track - fp.rho * damp) / (eps * eps))
}

/// Returns `(ι̇₁, ι̇₂)`.
pub fn comp_deriv(
    cs: &CompState,
    chi: &Vec3,
    alpha1: &Vec3,
    fd_hat: &Vec3,
    g: &CompGains,
) -> Result<(Vec3, Vec3), MathError> {
    let i1 = &cs.iota1;
    let i2 = &cs.iota2;
    let d1 = (i2 + chi - alpha1) - g.c1.apply(i1) * i1.norm_squared() - g.k.apply(i1) - g.k1.apply(&theta(i1, &g.sw)?);
    let d2 = -i1 - g.c2.apply(i2) * i2.norm_squared() - g.k2.apply(&frac_power(i2, g.sw.p_exp())?) + fd_hat;
    Ok((d1, d2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::rk4_step;
    use std::convert::Infallible;

    #[test]
    fn filter_equilibrium() {
        let a = Vec3::new(0.3, -1.0, 2.0);
        let fs = filter_init(&a);
        assert_eq!(fs.xi, Vec3::zeros());
        assert_eq!(filter_deriv(&fs, &a, &FilterParams::default()), (Vec3::zeros(), Vec3::zeros()));
        assert_eq!(filter_init(&Vec3::new(1.0, 2.0, 3.0)).chi, Vec3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn filter_deriv_unit_offset() {
        let fs = FilterState { chi: Vec3::new(1.0, 0.0, 0.0), xi: Vec3::zeros() };
        let (chi_dot, xi_dot) = filter_deriv(&fs, &Vec3::zeros(), &FilterParams::published());
        assert_eq!(chi_dot, Vec3::zeros());
        let expect = -0.5 * std::f64::consts::FRAC_PI_4 / 0.09;
        assert!((xi_dot.x - expect).abs() < 1e-12);
        assert!((xi_dot.x + 4.363323129985824).abs() < 1e-12);
        assert_eq!((xi_dot.y, xi_dot.z), (0.0, 0.0));
    }

    #[test]
    fn loop_damping_margin() {
        // the α₁ gain on ι₁ is k = 3..4 plus k₁ times the switch-map slope
        assert!(FilterParams::published().damping_rate() < 3.0);
        assert!(FilterParams::default().damping_rate() > 13.0);
    }

    #[test]
    fn filter_equilibrium_is_unique() {
        let fp = FilterParams::default();
        let a = Vec3::new(0.2, 0.1, -0.4);
        for (dc, dx) in [(1e-9, 0.0), (0.0, 1e-9), (-0.3, 0.2)] {
            let fs = FilterState { chi: a + Vec3::new(dc, 0.0, 0.0), xi: Vec3::new(dx, 0.0, 0.0) };
            let (c, x) = filter_deriv(&fs, &a, &fp);
            assert!(c.norm() + x.norm() > 0.0);
        }
    }

    #[test]
    fn filter_holds_constant_command() {
        let fp = FilterParams::default();
        let a = Vec3::new(1.0, 2.0, 3.0);
        let fs = filter_init(&a);
        let mut x: Vec<f64> = fs.chi.iter().chain(fs.xi.iter()).copied().collect();
        for k in 0..10_000 {
            x = rk4_step(
                |_, x: &[f64], dx: &mut [f64]| -> Result<(), Infallible> {
                    let fs = FilterState { chi: Vec3::new(x[0], x[1], x[2]), xi: Vec3::new(x[3], x[4], x[5]) };
                    let (c, xi) = filter_deriv(&fs, &a, &fp);
                    dx[..3].copy_from_slice(c.as_slice());
                    dx[3..].copy_from_slice(xi.as_slice());
                    Ok(())
                },
                &x,
                k as f64 * 1e-3,
                1e-3,
            )
            .unwrap();
        }
        assert!((Vec3::new(x[0], x[1], x[2]) - a).norm() < 1e-12);
    }

    #[test]
    fn comp_deriv_examples() {
        let g = CompGains::default();
        let zero = CompState::default();
        let (a, b) = comp_deriv(&zero, &Vec3::zeros(), &Vec3::zeros(), &Vec3::zeros(), &g).unwrap();
        assert_eq!((a, b), (Vec3::zeros(), Vec3::zeros()));

        let (a, b) = comp_deriv(&zero, &Vec3::new(0.1, 0.0, 0.0), &Vec3::zeros(), &Vec3::zeros(), &g).unwrap();
        assert_eq!(a, Vec3::new(0.1, 0.0, 0.0));
        assert_eq!(b, Vec3::zeros());

        let cs = CompState { iota1: Vec3::new(0.5, 0.0, 0.0), iota2: Vec3::zeros() };
        let (a, _) = comp_deriv(&cs, &Vec3::zeros(), &Vec3::zeros(), &Vec3::zeros(), &g).unwrap();
        let expect = -(0.25 * 0.5 + 3.0 * 0.5 + 0.5f64.sqrt());
        assert!((a.x - expect).abs() < 1e-12);
        assert!((a.x + 2.332106781186547).abs() < 1e-12);
    }

    #[test]
    fn comp_deriv_continuous_across_switch_and_origin() {
        let g = CompGains::default();
        let dir = Vec3::new(0.6, -0.8, 0.0);
        let mut prev: Option<(Vec3, Vec3)> = None;
        // sweep ι₁ through the switch radius 1e-2 and ι₂ through the origin
        for k in 0..=4000 {
            let r = -0.02 + k as f64 * 1e-5;
            let cs = CompState { iota1: dir * r.abs(), iota2: dir * r };
            let d = comp_deriv(&cs, &Vec3::zeros(), &Vec3::zeros(), &Vec3::zeros(), &g).unwrap();
            assert!(d.0.iter().chain(d.1.iter()).all(|c| c.is_finite()));
            if let Some(p) = prev {
                // ‖ι₂‖^{1/2} has unbounded slope at 0 but is still continuous
                assert!((d.0 - p.0).norm() < 5e-3);
                assert!((d.1 - p.1).norm() < 1e-2);
            }
            prev = Some(d);
        }
    }
}
