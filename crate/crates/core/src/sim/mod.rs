//! Six-degree-of-freedom fixed-wing plant with coefficient-buildup
//! aerodynamics, actuator lag and saturation, yaw damper, and auto-throttle,
//! stepped at 100 Hz with RK4.

mod control;
mod dynamics;
mod log;
mod model;
mod simulator;
mod state;
mod trim;

pub use control::{ActuatorState, Autothrottle, YawDamper};
pub use dynamics::{aero_coefficients, air_density, derivatives, envelope_violation, rk4_step, AeroCoefficients};
pub use log::{write_csv, write_csv_file, TrajectoryRow};
pub use model::{
    ActuatorConfig, AeroModel, AutothrottleConfig, PlantConfig, SurfaceLimits, YawDamperConfig,
};
pub use simulator::{Ifc, Simulator};
pub use state::{AircraftState, ControlInput};
pub use trim::{trim, TrimPoint};

/// m/s².
pub const GRAVITY: f64 = 9.80665;
