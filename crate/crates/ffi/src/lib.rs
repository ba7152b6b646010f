//! C ABI over the simulator.
//!
//! Every entry point returns an [`EtnnStatus`]; on failure a description is
//! kept per thread and can be fetched with [`etnn_last_error`]. Simulations
//! are owned through the opaque [`EtnnSim`] handle and released with
//! [`etnn_sim_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use etnn_core::config::{load_config, parse_config, RunConfig};
use etnn_core::experiment::{run_experiment, ExperimentError};
use etnn_core::metrics::{MetricsAccumulator, MetricsReport};
use etnn_core::sim::{settling_bound, value_bound, Simulation, TelemetryRow};
use etnn_core::Vec3;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtnnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Bad configuration text or file; exit code 2 of the CLI.
    ConfigError = 3,
    /// The plant left its safety envelope; exit code 3 of the CLI.
    Diverged = 4,
    /// The run already reached `t_end`.
    Finished = 5,
    IoError = 6,
    /// Arguments outside their admissible range.
    InvalidArgument = 7,
    Panic = 8,
}

/// Opaque simulation handle.
pub struct EtnnSim {
    sim: Simulation,
    acc: MetricsAccumulator,
    controller: String,
    trajectory: String,
    diverged: bool,
}

/// One control tick, sampled before the plant is advanced.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EtnnRow {
    pub t: f64,
    pub p: [f64; 3],
    pub p_d: [f64; 3],
    pub y1: [f64; 3],
    pub y2: [f64; 3],
    pub alpha2: [f64; 3],
    pub bar_u: [f64; 3],
    pub u_held: [f64; 3],
    pub kappa: f64,
    /// 1 when a command was transmitted at this tick.
    pub event: u8,
    pub v_s: f64,
    pub fhat: [f64; 3],
}

/// Tracking and event statistics over the post-transient window.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EtnnMetrics {
    pub t_end: f64,
    pub window_start: f64,
    pub max_err: [f64; 3],
    pub mean_err: [f64; 3],
    pub rms_err: [f64; 3],
    pub event_count: u64,
    pub total_ticks: u64,
    pub transmission_ratio: f64,
    pub min_inter_event: f64,
    pub mean_inter_event: f64,
    pub final_v_s: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: EtnnStatus, msg: impl Into<String>) -> EtnnStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> EtnnStatus) -> EtnnStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(EtnnStatus::Panic, "internal panic"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, EtnnStatus> {
    if s.is_null() {
        return Err(fail(EtnnStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(EtnnStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn arr(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

impl From<&TelemetryRow> for EtnnRow {
    fn from(r: &TelemetryRow) -> Self {
        Self {
            t: r.t,
            p: arr(&r.p),
            p_d: arr(&r.p_d),
            y1: arr(&r.y1),
            y2: arr(&r.y2),
            alpha2: arr(&r.alpha2),
            bar_u: arr(&r.bar_u),
            u_held: arr(&r.u_held),
            kappa: r.kappa,
            event: r.event as u8,
            v_s: r.v_s,
            fhat: arr(&r.fhat),
        }
    }
}

impl From<&MetricsReport> for EtnnMetrics {
    fn from(r: &MetricsReport) -> Self {
        Self {
            t_end: r.t_end,
            window_start: r.window_start,
            max_err: r.max_err,
            mean_err: r.mean_err,
            rms_err: r.rms_err,
            event_count: r.event_count,
            total_ticks: r.total_ticks,
            transmission_ratio: r.transmission_ratio,
            min_inter_event: r.min_inter_event,
            mean_inter_event: r.mean_inter_event,
            final_v_s: r.final_v_s,
        }
    }
}

fn new_handle(cfg: RunConfig) -> Result<Box<EtnnSim>, EtnnStatus> {
    cfg.validate().map_err(|e| fail(EtnnStatus::ConfigError, e.to_string()))?;
    let c = &cfg.closed_loop;
    let controller = c.mode.to_string();
    let trajectory = c.traj.kind.to_string();
    let acc = MetricsAccumulator::new(cfg.window_start, c.sim.control_period);
    let sim = Simulation::new(cfg.closed_loop).map_err(|e| fail(EtnnStatus::ConfigError, e))?;
    Ok(Box::new(EtnnSim { sim, acc, controller, trajectory, diverged: false }))
}

/// Creates a simulation from configuration text in the `key = value` dialect.
/// A null `config_text` selects the built-in defaults.
///
/// # Safety
/// `config_text` must be null or a NUL-terminated string; `out` must be a
/// valid pointer. On success `*out` owns a handle for [`etnn_sim_free`].
#[no_mangle]
pub unsafe extern "C" fn etnn_sim_new(config_text: *const c_char, out: *mut *mut EtnnSim) -> EtnnStatus {
    guard(|| {
        if out.is_null() {
            return fail(EtnnStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let cfg = if config_text.is_null() {
            RunConfig::default()
        } else {
            let text = match read_str(config_text, "config_text") {
                Ok(t) => t,
                Err(s) => return s,
            };
            match parse_config(text) {
                Ok(c) => c,
                Err(e) => return fail(EtnnStatus::ConfigError, e.to_string()),
            }
        };
        match new_handle(cfg) {
            Ok(h) => {
                *out = Box::into_raw(h);
                EtnnStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Creates a simulation from a configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn etnn_sim_from_file(path: *const c_char, out: *mut *mut EtnnSim) -> EtnnStatus {
    guard(|| {
        if out.is_null() {
            return fail(EtnnStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let path = match read_str(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let cfg = match load_config(Path::new(path)) {
            Ok(c) => c,
            Err(e) => return fail(EtnnStatus::ConfigError, format!("{path}: {e}")),
        };
        match new_handle(cfg) {
            Ok(h) => {
                *out = Box::into_raw(h);
                EtnnStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `sim` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn etnn_sim_free(sim: *mut EtnnSim) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

fn step_one(h: &mut EtnnSim, row: Option<&mut EtnnRow>) -> EtnnStatus {
    if h.diverged {
        return fail(EtnnStatus::Diverged, "simulation has already diverged");
    }
    if h.sim.finished() {
        return fail(EtnnStatus::Finished, "simulation reached t_end");
    }
    match h.sim.step() {
        Ok(r) => {
            h.acc.push(&r);
            if let Some(out) = row {
                *out = EtnnRow::from(&r);
            }
            EtnnStatus::Ok
        }
        Err(e) => {
            h.diverged = true;
            fail(EtnnStatus::Diverged, e.to_string())
        }
    }
}

/// Advances one control tick and optionally reports its telemetry row.
///
/// # Safety
/// `sim` must be a live handle; `row` may be null.
#[no_mangle]
pub unsafe extern "C" fn etnn_sim_step(sim: *mut EtnnSim, row: *mut EtnnRow) -> EtnnStatus {
    guard(|| match sim.as_mut() {
        None => fail(EtnnStatus::NullPointer, "sim is null"),
        Some(h) => step_one(h, row.as_mut()),
    })
}

/// Advances up to `max_ticks` ticks (0 means until `t_end`). The number of
/// ticks actually taken is written to `ticks_done` when it is non-null.
/// Reaching `t_end` is not an error.
///
/// # Safety
/// `sim` must be a live handle; `ticks_done` may be null.
#[no_mangle]
pub unsafe extern "C" fn etnn_sim_run(sim: *mut EtnnSim, max_ticks: u64, ticks_done: *mut u64) -> EtnnStatus {
    guard(|| {
        let Some(h) = sim.as_mut() else {
            return fail(EtnnStatus::NullPointer, "sim is null");
        };
        let mut n = 0u64;
        let mut status = EtnnStatus::Ok;
        while (max_ticks == 0 || n < max_ticks) && !h.sim.finished() {
            status = step_one(h, None);
            if status != EtnnStatus::Ok {
                break;
            }
            n += 1;
        }
        if let Some(d) = ticks_done.as_mut() {
            *d = n;
        }
        status
    })
}

/// Current simulation time in seconds, NaN for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn etnn_sim_time(sim: *const EtnnSim) -> f64 {
    sim.as_ref().map_or(f64::NAN, |h| h.sim.time())
}

/// 1 once the run reached `t_end`, 0 otherwise (also for null).
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn etnn_sim_finished(sim: *const EtnnSim) -> u8 {
    sim.as_ref().map_or(0, |h| h.sim.finished() as u8)
}

/// Position and velocity of the plant.
///
/// # Safety
/// `sim` must be a live handle; `p` and `v` must each point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn etnn_sim_plant_state(sim: *const EtnnSim, p: *mut f64, v: *mut f64) -> EtnnStatus {
    guard(|| {
        let Some(h) = sim.as_ref() else {
            return fail(EtnnStatus::NullPointer, "sim is null");
        };
        if p.is_null() || v.is_null() {
            return fail(EtnnStatus::NullPointer, "output buffer is null");
        }
        let st = &h.sim.state().plant;
        ptr::copy_nonoverlapping(st.p.as_ptr(), p, 3);
        ptr::copy_nonoverlapping(st.v.as_ptr(), v, 3);
        EtnnStatus::Ok
    })
}

/// Metrics over the ticks simulated so far.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn etnn_sim_metrics(sim: *const EtnnSim, out: *mut EtnnMetrics) -> EtnnStatus {
    guard(|| {
        let Some(h) = sim.as_ref() else {
            return fail(EtnnStatus::NullPointer, "sim is null");
        };
        let Some(out) = out.as_mut() else {
            return fail(EtnnStatus::NullPointer, "out is null");
        };
        let report = h.acc.finish(&h.controller, &h.trajectory, h.sim.config().sim.t_end, 0.0);
        *out = EtnnMetrics::from(&report);
        EtnnStatus::Ok
    })
}

/// Runs a configuration file to completion and writes the usual artifacts
/// (telemetry, metrics, resolved config) into `out_dir`.
///
/// # Safety
/// `config_path` and `out_dir` must be NUL-terminated strings; `out` may be
/// null.
#[no_mangle]
pub unsafe extern "C" fn etnn_run_file(
    config_path: *const c_char,
    out_dir: *const c_char,
    out: *mut EtnnMetrics,
) -> EtnnStatus {
    guard(|| {
        let (path, dir) = match (read_str(config_path, "config_path"), read_str(out_dir, "out_dir")) {
            (Ok(p), Ok(d)) => (p, d),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let cfg = match load_config(Path::new(path)) {
            Ok(c) => c,
            Err(e) => return fail(EtnnStatus::ConfigError, format!("{path}: {e}")),
        };
        match run_experiment(&cfg, Path::new(dir)) {
            Ok(outcome) => {
                if let Some(o) = out.as_mut() {
                    *o = EtnnMetrics::from(&outcome.report);
                }
                EtnnStatus::Ok
            }
            Err(e) => {
                let status = match e {
                    ExperimentError::Config(_) | ExperimentError::Reference(_) => EtnnStatus::ConfigError,
                    ExperimentError::Diverged { .. } => EtnnStatus::Diverged,
                    ExperimentError::Io { .. } => EtnnStatus::IoError,
                };
                fail(status, e.to_string())
            }
        }
    })
}

/// Settling-time bound `1/(l ω (1−p)) + 1/(ω m)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn etnn_settling_bound(l: f64, m: f64, p: f64, omega: f64, out: *mut f64) -> EtnnStatus {
    guard(|| {
        let Some(o) = out.as_mut() else {
            return fail(EtnnStatus::NullPointer, "out is null");
        };
        match settling_bound(l, m, p, omega) {
            Ok(t) => {
                *o = t;
                EtnnStatus::Ok
            }
            Err(e) => fail(EtnnStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Residual bound on the Lyapunov value.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn etnn_value_bound(l: f64, m: f64, n: f64, p: f64, omega: f64, out: *mut f64) -> EtnnStatus {
    guard(|| {
        let Some(o) = out.as_mut() else {
            return fail(EtnnStatus::NullPointer, "out is null");
        };
        match value_bound(l, m, n, p, omega) {
            Ok(v) => {
                *o = v;
                EtnnStatus::Ok
            }
            Err(e) => fail(EtnnStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`). Returns the buffer size needed for
/// the full message including the terminator, or 0 if there is no error.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn etnn_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn etnn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
