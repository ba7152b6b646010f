//! Closed-loop orchestration: one [`Simulation`] owns the plant, filter,
//! compensator, network weights and trigger state, advances them together on
//! one RK4 time base and applies the held command between control ticks.

mod analysis;
mod pid;

use std::fmt;
use std::str::FromStr;

pub use analysis::{lyapunov_surrogate, settling_bound, value_bound};
pub use pid::{pid_control, PidGains, PidState};

use crate::cfilter::{comp_deriv, filter_deriv, filter_init, CompGains, CompState, FilterParams, FilterState};
use crate::controller::{
    alpha1, alpha2, apply_event, bar_u, error_coords, kappa_deriv, trigger_fire, CtrlGains, TriggerParams, TriggerState,
};
use crate::error::SimError;
use crate::math::{rk4_step, Vec3};
use crate::nn::{forward, retract, update_deriv, NNConfig, NNInput, NNWeights};
use crate::plant::{plant_deriv, u_from_uc, PlantParams, PlantState};
use crate::trajectory::{traj_sample, TrajectorySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ControllerMode {
    /// Event-triggered neural backstepping.
    #[default]
    EtNn,
    /// Same controller, transmitted at every tick.
    TimeTriggeredNn,
    BaselinePid,
}

impl fmt::Display for ControllerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ControllerMode::EtNn => "et_nn",
            ControllerMode::TimeTriggeredNn => "time_triggered_nn",
            ControllerMode::BaselinePid => "baseline_pid",
        })
    }
}

impl FromStr for ControllerMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "et_nn" => Ok(ControllerMode::EtNn),
            "time_triggered_nn" => Ok(ControllerMode::TimeTriggeredNn),
            "baseline_pid" => Ok(ControllerMode::BaselinePid),
            other => Err(format!("unknown controller `{other}` (et_nn | time_triggered_nn | baseline_pid)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt_plant: f64,
    pub control_period: f64,
    pub t_end: f64,
    pub seed: u64,
    /// Initial position relative to `p_d(0)`.
    pub initial_offset: Vec3,
    pub initial_velocity: Vec3,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt_plant: 1e-3,
            control_period: 0.01,
            t_end: 60.0,
            seed: 7,
            initial_offset: Vec3::zeros(),
            initial_velocity: Vec3::zeros(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.dt_plant > 0.0) {
            return Err(format!("dt_plant must be positive, got {}", self.dt_plant));
        }
        if !(self.control_period > 0.0) {
            return Err(format!("control_period must be positive, got {}", self.control_period));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(format!("t_end must be positive, got {}", self.t_end));
        }
        let ratio = self.control_period / self.dt_plant;
        if ratio < 0.5 || (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return Err(format!(
                "control_period {} is not an integer multiple of dt_plant {}",
                self.control_period, self.dt_plant
            ));
        }
        Ok(())
    }

    pub fn substeps(&self) -> usize {
        (self.control_period / self.dt_plant).round() as usize
    }

    pub fn total_ticks(&self) -> u64 {
        (self.t_end / self.control_period).round() as u64
    }

    /// Time of tick `k`. With an integral tick rate this is `k / rate`, the
    /// correctly rounded decimal, rather than an accumulated product.
    pub fn tick_time(&self, k: u64) -> f64 {
        let rate = 1.0 / self.control_period;
        if (rate - rate.round()).abs() < 1e-9 * rate {
            k as f64 / rate.round()
        } else {
            k as f64 * self.control_period
        }
    }

    /// Length of `n` whole control periods.
    pub fn ticks_to_seconds(&self, n: u64) -> f64 {
        n as f64 * self.control_period
    }
}

/// Everything a single closed-loop run needs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClosedLoopConfig {
    pub plant: PlantParams,
    pub filter: FilterParams,
    pub comp: CompGains,
    pub ctrl: CtrlGains,
    pub trigger: TriggerParams,
    pub nn: NNConfig,
    pub pid: PidGains,
    pub traj: TrajectorySpec,
    pub sim: SimConfig,
    pub mode: ControllerMode,
}

impl ClosedLoopConfig {
    pub fn validate(&self) -> Result<(), String> {
        self.plant.validate()?;
        self.filter.validate()?;
        self.trigger.validate()?;
        self.nn.validate()?;
        self.traj.validate()?;
        self.sim.validate()?;
        if self.comp.sw != self.ctrl.sw {
            return Err("compensator and controller must share p and the switch threshold".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopState {
    pub plant: PlantState,
    pub filter: FilterState,
    pub comp: CompState,
    pub weights: NNWeights,
    pub trigger: TriggerState,
    pub pid: PidState,
}

/// One row per control tick, sampled before the plant is advanced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelemetryRow {
    pub t: f64,
    pub p: Vec3,
    pub p_d: Vec3,
    pub y1: Vec3,
    pub y2: Vec3,
    pub alpha2: Vec3,
    pub bar_u: Vec3,
    pub u_held: Vec3,
    pub kappa: f64,
    pub event: bool,
    pub v_s: f64,
    pub fhat: Vec3,
}

/// Runtime monitors, updated at every control tick.
#[derive(Debug, Clone, PartialEq)]
pub struct Monitors {
    /// Largest `y₂ᵀ(u_held − α₂)` seen at a tick.
    pub max_damping_term: f64,
    pub min_kappa: f64,
    /// Largest `|ẽⱼ| − (σ + κ/δ)` at ticks without an event.
    pub max_hold_excess: f64,
    pub min_inter_event: f64,
    pub inter_event_sum: f64,
    pub max_y1: f64,
    pub max_y2: f64,
    pub max_iota1: f64,
    pub max_iota2: f64,
    pub max_abs_kappa: f64,
    pub max_v0_norm: f64,
    pub max_v1_norm: f64,
}

impl Default for Monitors {
    fn default() -> Self {
        Self {
            max_damping_term: f64::NEG_INFINITY,
            min_kappa: f64::INFINITY,
            max_hold_excess: f64::NEG_INFINITY,
            min_inter_event: f64::INFINITY,
            inter_event_sum: 0.0,
            max_y1: 0.0,
            max_y2: 0.0,
            max_iota1: 0.0,
            max_iota2: 0.0,
            max_abs_kappa: 0.0,
            max_v0_norm: 0.0,
            max_v1_norm: 0.0,
        }
    }
}

// Flat state layout shared by pack/unpack and the derivative.
const P: usize = 0;
const V: usize = 3;
const CHI: usize = 6;
const XI: usize = 9;
const IOTA1: usize = 12;
const IOTA2: usize = 15;
const KAPPA: usize = 18;
const W: usize = 19;

fn v3(x: &[f64], at: usize) -> Vec3 {
    Vec3::new(x[at], x[at + 1], x[at + 2])
}

fn put(x: &mut [f64], at: usize, v: &Vec3) {
    x[at..at + 3].copy_from_slice(v.as_slice());
}

pub struct Simulation {
    cfg: ClosedLoopConfig,
    state: LoopState,
    tick: u64,
    last_event_tick: Option<u64>,
    monitors: Monitors,
}

impl Simulation {
    pub fn new(cfg: ClosedLoopConfig) -> Result<Self, String> {
        cfg.validate()?;
        let traj0 = traj_sample(&cfg.traj, 0.0);
        let plant = PlantState { p: traj0.p_d + cfg.sim.initial_offset, v: cfg.sim.initial_velocity };
        let comp = CompState::default();
        let weights = NNWeights::random(&cfg.nn, cfg.sim.seed);

        // χ(0) = α₁(0), evaluated with ξ and ι at rest
        let probe = FilterState { chi: Vec3::zeros(), xi: Vec3::zeros() };
        let ec = error_coords(&plant, &traj0, &probe, &comp);
        let a1 = alpha1(&traj0, &ec, &comp, &cfg.ctrl, &cfg.comp).map_err(|e| e.to_string())?;

        let state = LoopState {
            plant,
            filter: filter_init(&a1),
            comp,
            weights,
            trigger: TriggerState::new(&cfg.trigger),
            pid: PidState::default(),
        };
        Ok(Self { cfg, state, tick: 0, last_event_tick: None, monitors: Monitors::default() })
    }

    pub fn config(&self) -> &ClosedLoopConfig {
        &self.cfg
    }

    pub fn state(&self) -> &LoopState {
        &self.state
    }

    pub fn monitors(&self) -> &Monitors {
        &self.monitors
    }

    /// Time of the next tick.
    pub fn time(&self) -> f64 {
        self.cfg.sim.tick_time(self.tick)
    }

    pub fn ticks_done(&self) -> u64 {
        self.tick
    }

    pub fn finished(&self) -> bool {
        self.tick >= self.cfg.sim.total_ticks()
    }

    fn record_event(&mut self) {
        if let Some(last) = self.last_event_tick {
            let dwell = self.cfg.sim.ticks_to_seconds(self.tick - last);
            let m = &mut self.monitors;
            m.min_inter_event = m.min_inter_event.min(dwell);
            m.inter_event_sum += dwell;
        }
        self.last_event_tick = Some(self.tick);
    }

    /// Runs every remaining tick, handing each telemetry row to `sink`.
    pub fn run<F: FnMut(&TelemetryRow)>(&mut self, mut sink: F) -> Result<(), SimError> {
        while !self.finished() {
            let row = self.step()?;
            sink(&row);
        }
        Ok(())
    }

    /// Advances one control period and returns the row for the tick it
    /// started from.
    pub fn step(&mut self) -> Result<TelemetryRow, SimError> {
        let t = self.time();
        let row = match self.cfg.mode {
            ControllerMode::BaselinePid => self.pid_tick(t),
            _ => self.nn_tick(t)?,
        };
        self.integrate(t)?;
        self.tick += 1;
        Ok(row)
    }

    fn nn_tick(&mut self, t: f64) -> Result<TelemetryRow, SimError> {
        let cfg = &self.cfg;
        let st = &self.state;
        let traj = traj_sample(&cfg.traj, t);
        let ec = error_coords(&st.plant, &traj, &st.filter, &st.comp);
        let x_d = NNInput::from_velocity(&traj.pd_dot);
        let fhat = forward(&st.weights, &x_d);
        let a2 = alpha2(&st.filter.xi, &ec, &st.comp, &cfg.ctrl, &cfg.comp)?;
        let kappa = st.trigger.kappa;
        let bu = bar_u(&a2, &ec.y2, kappa, &cfg.trigger);

        let e_tilde = st.trigger.hold_error(&bu);
        let fire = st.trigger.event_count == 0
            || cfg.mode == ControllerMode::TimeTriggeredNn
            || trigger_fire(kappa, &e_tilde, &cfg.trigger);

        if fire {
            let next = apply_event(&st.trigger, &bu, t)?;
            self.state.trigger = next;
            self.record_event();
        } else {
            let threshold = cfg.trigger.sigma + kappa / cfg.trigger.delta;
            let excess = e_tilde.amax() - threshold;
            self.monitors.max_hold_excess = self.monitors.max_hold_excess.max(excess);
        }
        let st = &self.state;
        let m = &mut self.monitors;
        let u_held = st.trigger.u_held;

        m.max_damping_term = m.max_damping_term.max(ec.y2.dot(&(u_held - a2)));
        m.min_kappa = m.min_kappa.min(kappa);
        if kappa < -1e-9 {
            log::warn!("kappa = {kappa} < 0 at t = {t}");
        }
        m.max_abs_kappa = m.max_abs_kappa.max(kappa.abs());
        m.max_y1 = m.max_y1.max(ec.y1.norm());
        m.max_y2 = m.max_y2.max(ec.y2.norm());
        m.max_iota1 = m.max_iota1.max(st.comp.iota1.norm());
        m.max_iota2 = m.max_iota2.max(st.comp.iota2.norm());
        m.max_v0_norm = m.max_v0_norm.max(st.weights.v0_hat.norm());
        m.max_v1_norm = m.max_v1_norm.max(st.weights.v1_hat.norm());

        Ok(TelemetryRow {
            t,
            p: st.plant.p,
            p_d: traj.p_d,
            y1: ec.y1,
            y2: ec.y2,
            alpha2: a2,
            bar_u: bu,
            u_held,
            kappa,
            event: fire,
            v_s: lyapunov_surrogate(&ec, &st.comp),
            fhat,
        })
    }

    /// In baseline mode the error columns carry `e₁ = p − p_d` and
    /// `ė₁ = v − ṗ_d`, and every tick is a transmission.
    fn pid_tick(&mut self, t: f64) -> TelemetryRow {
        let cfg = &self.cfg;
        let traj = traj_sample(&cfg.traj, t);
        let st = &mut self.state;
        let e1 = st.plant.p - traj.p_d;
        let e1_dot = st.plant.v - traj.pd_dot;
        let uc = pid_control(&e1, &e1_dot, &mut st.pid, &cfg.pid, &traj, &cfg.plant, cfg.sim.control_period);
        let u = u_from_uc(&uc, &cfg.plant);
        st.trigger.u_held = u;
        st.trigger.t_last_event = Some(t);
        st.trigger.event_count += 1;
        self.record_event();
        let st = &self.state;
        let m = &mut self.monitors;
        m.max_y1 = m.max_y1.max(e1.norm());
        m.max_y2 = m.max_y2.max(e1_dot.norm());
        TelemetryRow {
            t,
            p: st.plant.p,
            p_d: traj.p_d,
            y1: e1,
            y2: e1_dot,
            alpha2: u,
            bar_u: u,
            u_held: u,
            kappa: 0.0,
            event: true,
            v_s: 0.5 * (e1.norm_squared() + e1_dot.norm_squared()),
            fhat: Vec3::zeros(),
        }
    }

    fn pack(&self) -> Vec<f64> {
        let st = &self.state;
        let mut x = vec![0.0; W + st.weights.len()];
        put(&mut x, P, &st.plant.p);
        put(&mut x, V, &st.plant.v);
        put(&mut x, CHI, &st.filter.chi);
        put(&mut x, XI, &st.filter.xi);
        put(&mut x, IOTA1, &st.comp.iota1);
        put(&mut x, IOTA2, &st.comp.iota2);
        x[KAPPA] = st.trigger.kappa;
        st.weights.write_flat(&mut x[W..]);
        x
    }

    fn unpack(&mut self, x: &[f64]) {
        let st = &mut self.state;
        st.plant = PlantState { p: v3(x, P), v: v3(x, V) };
        st.filter = FilterState { chi: v3(x, CHI), xi: v3(x, XI) };
        st.comp = CompState { iota1: v3(x, IOTA1), iota2: v3(x, IOTA2) };
        st.trigger.kappa = x[KAPPA];
        st.weights = NNWeights::from_flat(&self.cfg.nn, &x[W..]);
        retract(&mut st.weights.v0_hat, self.cfg.nn.vbar0);
        retract(&mut st.weights.v1_hat, self.cfg.nn.vbar1);
    }

    /// Integrates the joint state over one control period with the held
    /// command fixed. κ is driven by the running hold error `u_held − ū(t)`,
    /// with ū re-evaluated at every stage.
    fn integrate(&mut self, t0: f64) -> Result<(), SimError> {
        let cfg = &self.cfg;
        let u_held = self.state.trigger.u_held;
        let pid_mode = cfg.mode == ControllerMode::BaselinePid;
        let deriv = |t: f64, x: &[f64], dx: &mut [f64]| -> Result<(), SimError> {
            let plant = PlantState { p: v3(x, P), v: v3(x, V) };
            let (pdot, vdot) = plant_deriv(&plant, &u_held, t, &cfg.plant)?;
            put(dx, P, &pdot);
            put(dx, V, &vdot);
            if pid_mode {
                dx[CHI..].fill(0.0);
                return Ok(());
            }
            let fs = FilterState { chi: v3(x, CHI), xi: v3(x, XI) };
            let cs = CompState { iota1: v3(x, IOTA1), iota2: v3(x, IOTA2) };
            let w = NNWeights::from_flat(&cfg.nn, &x[W..]);
            let traj = traj_sample(&cfg.traj, t);
            let ec = error_coords(&plant, &traj, &fs, &cs);
            let x_d = NNInput::from_velocity(&traj.pd_dot);
            let fhat = forward(&w, &x_d);
            let a1 = alpha1(&traj, &ec, &cs, &cfg.ctrl, &cfg.comp)?;
            let (chi_dot, xi_dot) = filter_deriv(&fs, &a1, &cfg.filter);
            let (i1_dot, i2_dot) = comp_deriv(&cs, &fs.chi, &a1, &fhat, &cfg.comp)?;
            let (d0, d1) = update_deriv(&w, &x_d, &ec.y2, &cfg.nn);
            put(dx, CHI, &chi_dot);
            put(dx, XI, &xi_dot);
            put(dx, IOTA1, &i1_dot);
            put(dx, IOTA2, &i2_dot);
            let a2 = alpha2(&fs.xi, &ec, &cs, &cfg.ctrl, &cfg.comp)?;
            let e_tilde = u_held - bar_u(&a2, &ec.y2, x[KAPPA], &cfg.trigger);
            dx[KAPPA] = kappa_deriv(x[KAPPA], &e_tilde, &cfg.trigger);
            let n0 = d0.len();
            dx[W..W + n0].copy_from_slice(d0.as_slice());
            dx[W + n0..].copy_from_slice(d1.as_slice());
            Ok(())
        };

        let dt = cfg.sim.dt_plant;
        let mut x = self.pack();
        for k in 0..cfg.sim.substeps() {
            let t = t0 + k as f64 * dt;
            x = rk4_step(deriv, &x, t, dt)?;
            if let Some(i) = x.iter().position(|c| !c.is_finite()) {
                return Err(SimError::Divergence {
                    t: t + dt,
                    reason: format!("non-finite state component {i}"),
                    dump: format!("{x:?}"),
                });
            }
        }
        self.unpack(&x);
        Ok(())
    }
}
