use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient-buildup aerodynamic model plus mass properties.
///
/// Derivatives are per radian; rate derivatives use the nondimensional rates
/// `p̂ = pb/2V`, `q̂ = qc̄/2V`, `r̂ = rb/2V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AeroModel {
    pub mass: f64,
    pub wing_area: f64,
    pub span: f64,
    pub chord: f64,
    pub ixx: f64,
    pub iyy: f64,
    pub izz: f64,
    pub ixz: f64,

    pub cl0: f64,
    pub cl_alpha: f64,
    pub cl_q: f64,
    pub cl_de: f64,
    pub cl_max: f64,

    pub cd0: f64,
    pub k_induced: f64,
    /// Elevator drag, applied as `cd_de·|δe|`.
    pub cd_de: f64,

    pub cy_beta: f64,
    pub cy_dr: f64,

    pub cl_beta: f64,
    pub cl_p: f64,
    pub cl_r: f64,
    pub cl_da: f64,
    pub cl_dr: f64,

    pub cm0: f64,
    pub cm_alpha: f64,
    pub cm_q: f64,
    pub cm_de: f64,

    pub cn_beta: f64,
    pub cn_p: f64,
    pub cn_r: f64,
    pub cn_dr: f64,
    pub cn_da: f64,

    /// Longitudinal c.g. offset from the aerodynamic reference point, m,
    /// positive forward.
    pub cg_offset: f64,
}

impl Default for AeroModel {
    fn default() -> Self {
        Self {
            mass: 4500.0,
            wing_area: 24.6,
            span: 13.3,
            chord: 2.0,
            ixx: 14_000.0,
            iyy: 25_000.0,
            izz: 36_000.0,
            ixz: 900.0,

            cl0: 0.2,
            cl_alpha: 5.5,
            cl_q: 4.0,
            cl_de: 0.4,
            cl_max: 1.4,

            cd0: 0.022,
            k_induced: 0.045,
            cd_de: 0.03,

            cy_beta: -0.75,
            cy_dr: 0.2,

            cl_beta: -0.1,
            cl_p: -0.5,
            cl_r: 0.15,
            cl_da: 0.1,
            cl_dr: 0.02,

            cm0: 0.0,
            cm_alpha: -0.6,
            cm_q: -11.0,
            cm_de: -1.5,

            cn_beta: 0.12,
            cn_p: -0.03,
            cn_r: -0.2,
            cn_dr: -0.09,
            cn_da: -0.01,

            cg_offset: 0.0,
        }
    }
}

impl AeroModel {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("wing_area", self.wing_area),
            ("span", self.span),
            ("chord", self.chord),
            ("ixx", self.ixx),
            ("iyy", self.iyy),
            ("izz", self.izz),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("aero.{name} must be positive, got {v}")));
            }
        }
        if !self.ixz.is_finite() || self.ixx * self.izz - self.ixz * self.ixz <= 0.0 {
            return Err(Error::config("aero: inertia tensor must be positive definite"));
        }
        if !(self.cl_max > self.cl0) {
            return Err(Error::config("aero.cl_max must exceed aero.cl0"));
        }
        let all = [
            self.cl_alpha, self.cl_q, self.cl_de, self.cd0, self.k_induced, self.cd_de, self.cy_beta,
            self.cy_dr, self.cl_beta, self.cl_p, self.cl_r, self.cl_da, self.cl_dr, self.cm0, self.cm_alpha,
            self.cm_q, self.cm_de, self.cn_beta, self.cn_p, self.cn_r, self.cn_dr, self.cn_da, self.cg_offset,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("aero: coefficients must be finite"));
        }
        Ok(())
    }

    /// Model with every aerodynamic coefficient set to zero (mass properties
    /// kept).
    pub fn zero_aero(&self) -> Self {
        Self {
            cl0: 0.0,
            cl_alpha: 0.0,
            cl_q: 0.0,
            cl_de: 0.0,
            cl_max: 1.0,
            cd0: 0.0,
            k_induced: 0.0,
            cd_de: 0.0,
            cy_beta: 0.0,
            cy_dr: 0.0,
            cl_beta: 0.0,
            cl_p: 0.0,
            cl_r: 0.0,
            cl_da: 0.0,
            cl_dr: 0.0,
            cm0: 0.0,
            cm_alpha: 0.0,
            cm_q: 0.0,
            cm_de: 0.0,
            cn_beta: 0.0,
            cn_p: 0.0,
            cn_r: 0.0,
            cn_dr: 0.0,
            cn_da: 0.0,
            ..self.clone()
        }
    }
}

/// Actuator saturation limits (degrees in the config file) and lag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ActuatorConfig {
    pub elevator_min_deg: f64,
    pub elevator_max_deg: f64,
    pub aileron_max_deg: f64,
    pub rudder_max_deg: f64,
    /// First-order lag time constant, s.
    pub time_constant: f64,
}

impl Default for ActuatorConfig {
    fn default() -> Self {
        Self {
            elevator_min_deg: -20.05,
            elevator_max_deg: 14.90,
            aileron_max_deg: 20.0,
            rudder_max_deg: 22.0,
            time_constant: 1.0 / 30.0,
        }
    }
}

/// Per-surface limits in radians, ordered (elevator, aileron, rudder).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceLimits {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl SurfaceLimits {
    pub fn clamp(&self, v: [f64; 3]) -> [f64; 3] {
        std::array::from_fn(|i| v[i].clamp(self.min[i], self.max[i]))
    }
}

impl ActuatorConfig {
    pub fn limits(&self) -> SurfaceLimits {
        SurfaceLimits {
            min: [
                self.elevator_min_deg.to_radians(),
                -self.aileron_max_deg.to_radians(),
                -self.rudder_max_deg.to_radians(),
            ],
            max: [
                self.elevator_max_deg.to_radians(),
                self.aileron_max_deg.to_radians(),
                self.rudder_max_deg.to_radians(),
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.elevator_min_deg < 0.0 && self.elevator_max_deg > 0.0) {
            return Err(Error::config("actuators: elevator limits must bracket zero"));
        }
        if !(self.aileron_max_deg > 0.0 && self.rudder_max_deg > 0.0) {
            return Err(Error::config("actuators: aileron and rudder limits must be positive"));
        }
        if !(self.time_constant > 0.0 && self.time_constant.is_finite()) {
            return Err(Error::config("actuators.time_constant must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct YawDamperConfig {
    pub enabled: bool,
    /// Rudder deflection per unit washed-out yaw rate, rad/(rad/s).
    pub gain: f64,
    pub washout_time_constant: f64,
}

impl Default for YawDamperConfig {
    fn default() -> Self {
        Self { enabled: true, gain: 0.5, washout_time_constant: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AutothrottleConfig {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Thrust at zero speed error and zero integrator, N.
    pub feedforward: f64,
    pub max_thrust: f64,
}

impl Default for AutothrottleConfig {
    fn default() -> Self {
        Self { kp: 1000.0, ki: 80.0, kd: 0.0, feedforward: 3000.0, max_thrust: 20_000.0 }
    }
}

/// Everything that defines the plant.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlantConfig {
    pub aero: AeroModel,
    pub actuators: ActuatorConfig,
    pub yaw_damper: YawDamperConfig,
    pub autothrottle: AutothrottleConfig,
}

impl PlantConfig {
    pub fn validate(&self) -> Result<()> {
        self.aero.validate()?;
        self.actuators.validate()?;
        let yd = &self.yaw_damper;
        if !(yd.gain.is_finite() && yd.washout_time_constant > 0.0) {
            return Err(Error::config("yaw_damper: gain must be finite and washout_time_constant positive"));
        }
        let at = &self.autothrottle;
        if !(at.max_thrust > 0.0 && at.feedforward >= 0.0 && at.feedforward <= at.max_thrust) {
            return Err(Error::config("autothrottle: need 0 <= feedforward <= max_thrust"));
        }
        if ![at.kp, at.ki, at.kd].iter().all(|g| g.is_finite() && *g >= 0.0) {
            return Err(Error::config("autothrottle: gains must be finite and non-negative"));
        }
        Ok(())
    }
}
