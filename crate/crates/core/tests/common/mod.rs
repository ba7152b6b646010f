#![allow(dead_code)]

use etnn_core::sim::{ClosedLoopConfig, ControllerMode, Monitors, Simulation, TelemetryRow};
use etnn_core::trajectory::TrajectoryKind;
use etnn_core::SimError;

pub fn nominal(kind: TrajectoryKind, mode: ControllerMode) -> ClosedLoopConfig {
    let mut cfg = ClosedLoopConfig::default();
    cfg.traj.kind = kind;
    cfg.mode = mode;
    cfg
}

pub fn run_rows(cfg: ClosedLoopConfig) -> Result<(Vec<TelemetryRow>, Monitors), SimError> {
    let mut sim = Simulation::new(cfg).expect("valid config");
    let mut rows = Vec::new();
    sim.run(|r| rows.push(*r))?;
    Ok((rows, sim.monitors().clone()))
}

/// Integrates `deriv` with fixed-step RK4 from `t0` for `steps` steps,
/// calling `visit(t, x)` after every step.
pub fn integrate<F, V>(mut deriv: F, x0: Vec<f64>, dt: f64, steps: usize, mut visit: V) -> Vec<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    V: FnMut(f64, &[f64]),
{
    let mut x = x0;
    for i in 0..steps {
        let t = i as f64 * dt;
        x = etnn_core::math::rk4_step::<_, ()>(
            |t, s, d| {
                deriv(t, s, d);
                Ok(())
            },
            &x,
            t,
            dt,
        )
        .unwrap();
        visit((i + 1) as f64 * dt, &x);
    }
    x
}
