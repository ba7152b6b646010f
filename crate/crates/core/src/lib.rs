//! Adaptive event-triggered, command-filtered backstepping control of the
//! translational dynamics of an aerial manipulator, with a three-layer
//! neural approximation of the friction term.
//!
//! The crate is organised bottom-up:
//!
//! - [`math`]: vector helpers, the smooth switching map, RK4
//! - [`plant`]: normalized translational dynamics with friction and disturbance
//! - [`cfilter`]: command filter and compensation system
//! - [`nn`]: sigmoid network, weight update laws, projection
//! - [`controller`]: error coordinates, virtual controls, event trigger
//! - [`trajectory`], [`sim`]: references, closed loop, PID baseline, bounds
//! - [`config`], [`telemetry`], [`metrics`], [`experiment`]: batch harness

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cfilter;
pub mod config;
pub mod controller;
pub mod error;
pub mod experiment;
pub mod math;
pub mod metrics;
pub mod nn;
pub mod plant;
pub mod sim;
pub mod telemetry;
pub mod trajectory;

pub use error::{BoundError, ConfigError, MathError, ReportError, SimError};
pub use math::{DiagGain3, SwitchParams, Vec3};
