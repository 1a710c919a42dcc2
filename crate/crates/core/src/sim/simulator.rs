use serde::{Deserialize, Serialize};

use super::control::{ActuatorState, Autothrottle, YawDamper};
use super::dynamics::{envelope_violation, rk4_step};
use super::model::PlantConfig;
use super::state::{AircraftState, ControlInput};
use crate::error::{Error, Result};
use crate::fault::{apply_failure, gust_alpha_offset, FailureSpec, GustSpec};
use crate::DT;

/// Initial flight condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ifc {
    /// m.
    pub altitude: f64,
    /// m/s.
    pub speed: f64,
}

impl Default for Ifc {
    fn default() -> Self {
        Self { altitude: 2000.0, speed: 90.0 }
    }
}

impl Ifc {
    pub fn new(altitude: f64, speed: f64) -> Self {
        Self { altitude, speed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.speed.is_finite() && self.speed > 0.0) {
            return Err(Error::config(format!("initial speed must be positive, got {}", self.speed)));
        }
        if !(self.altitude.is_finite() && (0.0..=11_000.0).contains(&self.altitude)) {
            return Err(Error::config(format!("initial altitude must lie in [0, 11000] m, got {}", self.altitude)));
        }
        Ok(())
    }
}

/// 100 Hz plant: actuators, yaw damper, failures, auto-throttle, gusts, and an
/// RK4 rigid-body step.
#[derive(Debug, Clone)]
pub struct Simulator {
    config: PlantConfig,
    failure: FailureSpec,
    gust: GustSpec,
    state: AircraftState,
    actuators: ActuatorState,
    yaw_damper: YawDamper,
    autothrottle: Autothrottle,
    time: f64,
    steps: u64,
    applied: ControlInput,
    aborted: Option<String>,
}

impl Simulator {
    pub fn new(config: PlantConfig) -> Result<Self> {
        Self::with_disturbances(config, FailureSpec::none(), GustSpec::default())
    }

    pub fn with_disturbances(config: PlantConfig, failure: FailureSpec, gust: GustSpec) -> Result<Self> {
        config.validate()?;
        failure.validate()?;
        gust.validate()?;
        let actuators =
            ActuatorState::new(config.actuators.limits(), config.actuators.time_constant, DT);
        let yaw_damper = YawDamper::new(&config.yaw_damper, DT);
        let autothrottle = Autothrottle::new(config.autothrottle.clone(), 0.0);
        let mut sim = Self {
            config,
            failure,
            gust,
            state: AircraftState::default(),
            actuators,
            yaw_damper,
            autothrottle,
            time: 0.0,
            steps: 0,
            applied: ControlInput::default(),
            aborted: None,
        };
        sim.reset(Ifc::default())?;
        Ok(sim)
    }

    pub fn config(&self) -> &PlantConfig {
        &self.config
    }

    pub fn failure(&self) -> &FailureSpec {
        &self.failure
    }

    pub fn set_disturbances(&mut self, failure: FailureSpec, gust: GustSpec) -> Result<()> {
        failure.validate()?;
        gust.validate()?;
        self.failure = failure;
        self.gust = gust;
        Ok(())
    }

    /// Untrimmed start: level attitude, zero rates and deflections, speed
    /// setpoint equal to the initial speed.
    pub fn reset(&mut self, ifc: Ifc) -> Result<AircraftState> {
        ifc.validate()?;
        self.reset_to_state(AircraftState::level(ifc.altitude, ifc.speed), [0.0; 3], None)
    }

    /// Starts from an arbitrary state with given surface positions. With
    /// `thrust = Some(t)` the auto-throttle feedforward is set to `t`.
    pub fn reset_to_state(
        &mut self,
        state: AircraftState,
        surfaces: [f64; 3],
        thrust: Option<f64>,
    ) -> Result<AircraftState> {
        if let Some(reason) = envelope_violation(&state) {
            return Err(Error::config(format!("invalid initial state: {reason}")));
        }
        self.state = state;
        self.actuators.set_position(surfaces);
        self.yaw_damper.reset();
        self.autothrottle.config = self.config.autothrottle.clone();
        if let Some(t) = thrust {
            self.autothrottle.config.feedforward = t.clamp(0.0, self.config.autothrottle.max_thrust);
        }
        self.autothrottle.reset(state.airspeed());
        self.time = 0.0;
        self.steps = 0;
        let pos = self.actuators.position;
        self.applied = ControlInput { elevator: pos[0], aileron: pos[1], rudder: pos[2], thrust: self.autothrottle.config.feedforward };
        self.aborted = None;
        Ok(state)
    }

    pub fn state(&self) -> &AircraftState {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn actuators(&self) -> &ActuatorState {
        &self.actuators
    }

    /// Effective surfaces and thrust applied during the last step.
    pub fn applied_input(&self) -> &ControlInput {
        &self.applied
    }

    pub fn is_aborted(&self) -> bool {
        self.aborted.is_some()
    }

    /// Advances one control period with commanded surface positions
    /// `[δe, δa, δr]` (rad).
    pub fn step(&mut self, command: [f64; 3]) -> Result<AircraftState> {
        if let Some(reason) = &self.aborted {
            return Err(Error::Precondition(format!("simulator aborted ({reason}); reset required")));
        }
        if command.iter().any(|c| !c.is_finite()) {
            return Err(Error::numeric("non-finite surface command"));
        }
        let t = self.time;
        let mut cmd = command;
        cmd[2] += self.yaw_damper.update(self.state.r);
        let positions = self.actuators.advance(cmd);
        let surfaces = ControlInput::surfaces(positions[0], positions[1], positions[2]);
        let (mut input, model) = apply_failure(&self.failure, t, surfaces, &self.config.aero);
        let airspeed = self.state.airspeed();
        input.thrust = self.autothrottle.update(airspeed, DT);
        let gust = gust_alpha_offset(&self.gust, t, airspeed);
        self.applied = input;

        let next = rk4_step(&self.state, &input, &model, gust, DT)
            .and_then(|s| match envelope_violation(&s) {
                Some(reason) => Err(reason),
                None if s.h < 0.0 => Err("altitude below ground"),
                None => Ok(s),
            });
        self.steps += 1;
        self.time = self.steps as f64 * DT;
        match next {
            Ok(s) => {
                self.state = s;
                Ok(s)
            }
            Err(reason) => {
                self.aborted = Some(reason.to_string());
                Err(Error::Abort { time: self.time, reason: reason.to_string() })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reset_sets_initial_condition() {
        let mut sim = Simulator::new(PlantConfig::default()).unwrap();
        for (h, v) in [(2000.0, 90.0), (5000.0, 140.0)] {
            let s = sim.reset(Ifc::new(h, v)).unwrap();
            assert_eq!(s.h, h);
            assert_eq!(s.airspeed(), v);
            assert_eq!(sim.actuators().position, [0.0; 3]);
        }
        let a = sim.reset(Ifc::default()).unwrap();
        let b = sim.reset(Ifc::default()).unwrap();
        assert_eq!(a, b);
        assert!(sim.reset(Ifc::new(2000.0, 0.0)).is_err());
    }

    #[test]
    fn abort_blocks_further_steps() {
        let mut sim = Simulator::new(PlantConfig::default()).unwrap();
        sim.reset(Ifc::new(30.0, 90.0)).unwrap();
        let mut aborted = false;
        for _ in 0..5000 {
            if sim.step([0.3, 0.0, 0.0]).is_err() {
                aborted = true;
                break;
            }
        }
        assert!(aborted);
        assert!(matches!(sim.step([0.0; 3]), Err(Error::Precondition(_))));
        sim.reset(Ifc::default()).unwrap();
        assert!(sim.step([0.0; 3]).is_ok());
    }
}
