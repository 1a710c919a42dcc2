//! Actuator lag and saturation, yaw damper, auto-throttle.

use super::model::{AutothrottleConfig, SurfaceLimits, YawDamperConfig};

/// First-order lag per surface, discretized exactly at the step size. The
/// command is saturated before filtering, so positions never leave the limits.
#[derive(Debug, Clone, PartialEq)]
pub struct ActuatorState {
    pub position: [f64; 3],
    pub command: [f64; 3],
    limits: SurfaceLimits,
    blend: f64,
}

impl ActuatorState {
    pub fn new(limits: SurfaceLimits, time_constant: f64, dt: f64) -> Self {
        Self { position: [0.0; 3], command: [0.0; 3], limits, blend: 1.0 - (-dt / time_constant).exp() }
    }

    pub fn limits(&self) -> &SurfaceLimits {
        &self.limits
    }

    /// Sets positions directly (clamped), e.g. when starting from trim.
    pub fn set_position(&mut self, position: [f64; 3]) {
        self.position = self.limits.clamp(position);
        self.command = self.position;
    }

    pub fn advance(&mut self, command: [f64; 3]) -> [f64; 3] {
        self.command = self.limits.clamp(command);
        for i in 0..3 {
            self.position[i] += self.blend * (self.command[i] - self.position[i]);
            // rounding can overshoot by an ulp
            self.position[i] = self.position[i].clamp(self.limits.min[i], self.limits.max[i]);
        }
        self.position
    }
}

/// Washout-filtered yaw-rate feedback to the rudder.
#[derive(Debug, Clone, PartialEq)]
pub struct YawDamper {
    gain: f64,
    enabled: bool,
    blend: f64,
    low_pass: f64,
}

impl YawDamper {
    pub fn new(config: &YawDamperConfig, dt: f64) -> Self {
        Self {
            gain: config.gain,
            enabled: config.enabled,
            blend: 1.0 - (-dt / config.washout_time_constant).exp(),
            low_pass: 0.0,
        }
    }

    pub fn reset(&mut self) {
        self.low_pass = 0.0;
    }

    /// Rudder contribution for yaw rate `r`; advances the filter one step.
    pub fn update(&mut self, r: f64) -> f64 {
        if !self.enabled {
            return 0.0;
        }
        let high_pass = r - self.low_pass;
        self.low_pass += self.blend * (r - self.low_pass);
        self.gain * high_pass
    }
}

/// PID speed hold with feedforward, clamped output, and conditional
/// integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Autothrottle {
    pub config: AutothrottleConfig,
    pub setpoint: f64,
    pub integrator: f64,
    prev_error: Option<f64>,
}

impl Autothrottle {
    pub fn new(config: AutothrottleConfig, setpoint: f64) -> Self {
        Self { config, setpoint, integrator: 0.0, prev_error: None }
    }

    pub fn reset(&mut self, setpoint: f64) {
        self.setpoint = setpoint;
        self.integrator = 0.0;
        self.prev_error = None;
    }

    pub fn update(&mut self, airspeed: f64, dt: f64) -> f64 {
        let c = &self.config;
        let e = self.setpoint - airspeed;
        let de = self.prev_error.map_or(0.0, |p| (e - p) / dt);
        self.prev_error = Some(e);
        let unclamped = |i: f64| c.feedforward + c.kp * e + c.ki * i + c.kd * de;
        let raw = unclamped(self.integrator);
        // integrate only while the output is unsaturated or the error drives it
        // back inside
        let saturated_high = raw >= c.max_thrust && e > 0.0;
        let saturated_low = raw <= 0.0 && e < 0.0;
        if !(saturated_high || saturated_low) {
            self.integrator += e * dt;
        }
        unclamped(self.integrator).clamp(0.0, c.max_thrust)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::model::ActuatorConfig;

    #[test]
    fn at_setpoint_gives_feedforward() {
        let mut at = Autothrottle::new(AutothrottleConfig::default(), 90.0);
        assert_eq!(at.update(90.0, 0.01), AutothrottleConfig::default().feedforward);
    }

    #[test]
    fn thrust_rises_monotonically_to_clamp() {
        let cfg = AutothrottleConfig::default();
        let mut at = Autothrottle::new(cfg.clone(), 90.0);
        let mut last = 0.0;
        let mut reached = false;
        for _ in 0..100_000 {
            let t = at.update(80.0, 0.01);
            assert!(t >= last);
            last = t;
            if t == cfg.max_thrust {
                reached = true;
                break;
            }
        }
        assert!(reached);
        // anti-windup: integrator frozen once saturated
        let i = at.integrator;
        at.update(80.0, 0.01);
        assert_eq!(at.integrator, i);
    }

    #[test]
    fn actuator_never_exceeds_limits() {
        let lim = ActuatorConfig::default().limits();
        let mut a = ActuatorState::new(lim, 1.0 / 30.0, 0.01);
        for _ in 0..500 {
            let p = a.advance([1.0, -1.0, 1.0]);
            for i in 0..3 {
                assert!(p[i] <= lim.max[i] && p[i] >= lim.min[i]);
            }
        }
        assert!((a.position[0] - lim.max[0]).abs() < 1e-12);
        assert!((a.position[1] - lim.min[1]).abs() < 1e-12);
    }

    #[test]
    fn washout_rejects_steady_rate() {
        let mut yd = YawDamper::new(&YawDamperConfig::default(), 0.01);
        let first = yd.update(0.1);
        let mut last = first;
        for _ in 0..2000 {
            last = yd.update(0.1);
        }
        assert!(first > 0.0);
        assert!(last.abs() < 1e-6);
    }
}
