//! Soft Actor-Critic flight-control workbench.
//!
//! The crate is organised bottom-up:
//!
//! - [`nn`]: fixed-topology MLPs with layer normalization, exact reverse-mode
//!   gradients, Xavier initialization, Adam, and a binary checkpoint container.
//! - [`sac`]: the Soft Actor-Critic learner (tanh-squashed Gaussian policy,
//!   double Q-functions with soft-updated targets, replay memory, automatic
//!   entropy temperature).
//! - [`sim`]: a 6-DoF coefficient-buildup fixed-wing plant with actuator lag and
//!   saturation, yaw damper, and PID auto-throttle, stepped at 100 Hz.
//! - [`fault`]: failure cases, biased sensor noise, and discrete vertical gusts.
//! - [`env`]: the attitude and altitude reinforcement-learning environments and
//!   their cascaded interconnection.
//! - [`harness`]: reference programs, training curricula, nMAE evaluation,
//!   robustness matrix, reliability sweep, and a toy double-integrator check.
//! - [`config`]: the TOML experiment configuration with validated defaults.

pub mod config;
pub mod env;
pub mod error;
pub mod fault;
pub mod harness;
pub mod nn;
pub mod sac;
pub mod sim;

pub use error::{Error, Result};

/// Control and simulation rate.
pub const CONTROL_RATE_HZ: f64 = 100.0;
/// Fixed integration and control step in seconds.
pub const DT: f64 = 1.0 / CONTROL_RATE_HZ;
