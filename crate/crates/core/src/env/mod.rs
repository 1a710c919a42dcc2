//! Attitude and altitude reinforcement-learning environments and their
//! cascaded interconnection.

mod reward;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use reward::{
    altitude_reward, attitude_reward, pitch_ref_increment, weighted_attitude_error, ClipMode, IncrementMap,
    ALTITUDE_COST, ATTITUDE_COST, PITCH_REF_RATE_PER_STEP,
};

use crate::error::{Error, Result};
use crate::fault::{observe, FailureSpec, GustSpec, Measurement, NoiseSpec, ScenarioSpec};
use crate::sac::FrozenPolicy;
use crate::sim::{AircraftState, Ifc, PlantConfig, Simulator, TrajectoryRow};

pub const ATTITUDE_OBS_DIM: usize = 9;
pub const ATTITUDE_ACTION_DIM: usize = 3;
pub const ALTITUDE_OBS_DIM: usize = 2;
pub const ALTITUDE_ACTION_DIM: usize = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvConfig {
    pub clip_mode: ClipMode,
    /// Symmetric limit on the integrated pitch reference, deg.
    pub pitch_ref_limit_deg: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self { clip_mode: ClipMode::Absolute, pitch_ref_limit_deg: 30.0 }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.pitch_ref_limit_deg > 0.0 && self.pitch_ref_limit_deg <= 90.0) {
            return Err(Error::config("env.pitch_ref_limit_deg must lie in (0, 90]"));
        }
        Ok(())
    }
}

/// Attitude references, rad. β^R is always zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AttitudeRefs {
    pub theta: f64,
    pub phi: f64,
}

impl AttitudeRefs {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    pub fn beta(&self) -> f64 {
        0.0
    }
}

/// Result of one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub state: AircraftState,
    /// Set when the simulator left the envelope; the transition is invalid.
    pub aborted: Option<String>,
}

/// Inner-loop environment: observation `[c⊙e, u, p, q, r]`, action mapped to
/// surface increments.
#[derive(Debug, Clone)]
pub struct AttitudeEnv {
    sim: Simulator,
    map: IncrementMap,
    u: [f64; 3],
    measured: Measurement,
    noise: NoiseSpec,
    rng: ChaCha8Rng,
    clip_mode: ClipMode,
}

impl AttitudeEnv {
    pub fn new(plant: PlantConfig, env: &EnvConfig) -> Result<Self> {
        Self::with_disturbances(plant, env, FailureSpec::none(), NoiseSpec::default(), GustSpec::default())
    }

    pub fn with_disturbances(
        plant: PlantConfig,
        env: &EnvConfig,
        failure: FailureSpec,
        noise: NoiseSpec,
        gust: GustSpec,
    ) -> Result<Self> {
        env.validate()?;
        noise.validate()?;
        let map = IncrementMap::from_limits(&plant.actuators.limits());
        let sim = Simulator::with_disturbances(plant, failure, gust)?;
        let rng = ChaCha8Rng::seed_from_u64(noise.seed);
        let mut e = Self {
            sim,
            map,
            u: [0.0; 3],
            measured: Measurement::default(),
            noise,
            rng,
            clip_mode: env.clip_mode,
        };
        e.reset(Ifc::default())?;
        Ok(e)
    }

    pub fn for_scenario(plant: PlantConfig, env: &EnvConfig, scenario: &ScenarioSpec) -> Result<Self> {
        let mut e = Self::with_disturbances(
            plant,
            env,
            scenario.failure.clone(),
            scenario.noise.clone(),
            scenario.gust.clone(),
        )?;
        e.reset(scenario.ifc)?;
        Ok(e)
    }

    /// Untrimmed reset. The noise stream restarts from its seed so episodes
    /// are reproducible.
    pub fn reset(&mut self, ifc: Ifc) -> Result<AircraftState> {
        let s = self.sim.reset(ifc)?;
        self.u = self.sim.actuators().position;
        self.rng = ChaCha8Rng::seed_from_u64(self.noise.seed);
        self.measured = observe(&Measurement::from_state(&s), &self.noise, &mut self.rng);
        Ok(s)
    }

    pub fn simulator(&self) -> &Simulator {
        &self.sim
    }

    pub fn state(&self) -> &AircraftState {
        self.sim.state()
    }

    pub fn time(&self) -> f64 {
        self.sim.time()
    }

    /// Commanded surface positions `[δe, δa, δr]`, rad.
    pub fn input(&self) -> [f64; 3] {
        self.u
    }

    /// Latest (possibly noisy) measurement.
    pub fn measurement(&self) -> &Measurement {
        &self.measured
    }

    pub fn increment_map(&self) -> &IncrementMap {
        &self.map
    }

    pub fn clip_mode(&self) -> ClipMode {
        self.clip_mode
    }

    /// `e = x^R − x` on `[β, θ, φ]` from the latest measurement.
    pub fn tracking_error(&self, refs: AttitudeRefs) -> [f64; 3] {
        let m = &self.measured;
        [refs.beta() - m.beta, refs.theta - m.theta, refs.phi - m.phi]
    }

    pub fn observe(&self, refs: AttitudeRefs) -> [f64; ATTITUDE_OBS_DIM] {
        let w = weighted_attitude_error(self.tracking_error(refs));
        let m = &self.measured;
        [w[0], w[1], w[2], self.u[0], self.u[1], self.u[2], m.p, m.q, m.r]
    }

    /// Applies `a ∈ [−1, 1]³`, advances the plant one step and scores the new
    /// state against `refs`.
    pub fn step(&mut self, action: &[f64], refs: AttitudeRefs) -> Result<StepOutcome> {
        if action.len() != ATTITUDE_ACTION_DIM {
            return Err(Error::shape(format!("attitude action has {} entries, expected 3", action.len())));
        }
        if action.iter().any(|a| !a.is_finite()) {
            return Err(Error::numeric("non-finite attitude action"));
        }
        let du = self.map.apply([action[0], action[1], action[2]]);
        let limits = self.sim.actuators().limits();
        self.u = limits.clamp(std::array::from_fn(|i| self.u[i] + du[i]));
        match self.sim.step(self.u) {
            Ok(s) => {
                let e = [-s.beta(), refs.theta - s.theta, refs.phi - s.phi];
                let reward = attitude_reward(e, self.clip_mode);
                self.measured = observe(&Measurement::from_state(&s), &self.noise, &mut self.rng);
                Ok(StepOutcome { reward, state: s, aborted: None })
            }
            Err(Error::Abort { reason, .. }) => {
                Ok(StepOutcome { reward: -1.0, state: *self.sim.state(), aborted: Some(reason) })
            }
            Err(e) => Err(e),
        }
    }
}

/// Result of one cascaded step.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeOutcome {
    pub altitude_reward: f64,
    pub attitude_reward: f64,
    pub state: AircraftState,
    pub aborted: Option<String>,
}

/// Outer-loop environment wrapped around the attitude environment. The outer
/// action integrates into θ^R, which the inner controller then tracks.
#[derive(Debug, Clone)]
pub struct CascadeEnv {
    inner: AttitudeEnv,
    theta_ref: f64,
    theta_ref_limit: f64,
}

impl CascadeEnv {
    pub fn new(inner: AttitudeEnv, env: &EnvConfig) -> Result<Self> {
        env.validate()?;
        let theta_ref = inner.state().theta;
        Ok(Self { inner, theta_ref, theta_ref_limit: env.pitch_ref_limit_deg.to_radians() })
    }

    pub fn for_scenario(plant: PlantConfig, env: &EnvConfig, scenario: &ScenarioSpec) -> Result<Self> {
        Self::new(AttitudeEnv::for_scenario(plant, env, scenario)?, env)
    }

    /// Resets the plant; θ^R starts at the current pitch angle.
    pub fn reset(&mut self, ifc: Ifc) -> Result<AircraftState> {
        let s = self.inner.reset(ifc)?;
        self.theta_ref = s.theta;
        Ok(s)
    }

    pub fn inner(&self) -> &AttitudeEnv {
        &self.inner
    }

    pub fn state(&self) -> &AircraftState {
        self.inner.state()
    }

    pub fn time(&self) -> f64 {
        self.inner.time()
    }

    /// Current pitch reference θ^R, rad.
    pub fn pitch_ref(&self) -> f64 {
        self.theta_ref
    }

    /// `[c^alt·(h^R − h), θ^R]` from the previous step's feedback.
    pub fn observe(&self, h_ref: f64) -> [f64; ALTITUDE_OBS_DIM] {
        [ALTITUDE_COST * (h_ref - self.inner.measurement().h), self.theta_ref]
    }

    /// Integrates the outer action into θ^R and returns the inner observation
    /// for the updated references.
    pub fn advance_pitch_ref(&mut self, outer_action: f64, phi_ref: f64) -> [f64; ATTITUDE_OBS_DIM] {
        let a = if outer_action.is_finite() { outer_action } else { 0.0 };
        self.theta_ref = (self.theta_ref + pitch_ref_increment(a)).clamp(-self.theta_ref_limit, self.theta_ref_limit);
        self.inner.observe(AttitudeRefs::new(self.theta_ref, phi_ref))
    }

    /// Completes a step started with [`advance_pitch_ref`](Self::advance_pitch_ref).
    pub fn apply_inner(&mut self, inner_action: &[f64], h_ref: f64, phi_ref: f64) -> Result<CascadeOutcome> {
        let out = self.inner.step(inner_action, AttitudeRefs::new(self.theta_ref, phi_ref))?;
        let altitude_reward = if out.aborted.is_some() {
            -1.0
        } else {
            altitude_reward(h_ref - out.state.h, self.inner.clip_mode)
        };
        Ok(CascadeOutcome { altitude_reward, attitude_reward: out.reward, state: out.state, aborted: out.aborted })
    }

    /// One full cascaded step with a frozen inner policy. Returns the outcome
    /// and the inner observation that was acted on.
    pub fn step(
        &mut self,
        outer_action: f64,
        inner: &FrozenPolicy,
        h_ref: f64,
        phi_ref: f64,
    ) -> Result<(CascadeOutcome, [f64; ATTITUDE_OBS_DIM])> {
        let obs = self.advance_pitch_ref(outer_action, phi_ref);
        let a = inner.act(&obs)?;
        Ok((self.apply_inner(&a, h_ref, phi_ref)?, obs))
    }
}

/// One episode-log sample: references, states, surfaces, rewards. Angles in
/// degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpisodeRow {
    pub t: f64,
    pub h_ref: f64,
    pub theta_ref_deg: f64,
    pub phi_ref_deg: f64,
    pub beta_ref_deg: f64,
    pub h: f64,
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub beta_deg: f64,
    pub psi_deg: f64,
    pub alpha_deg: f64,
    pub airspeed: f64,
    pub p_dps: f64,
    pub q_dps: f64,
    pub r_dps: f64,
    pub elevator_deg: f64,
    pub aileron_deg: f64,
    pub rudder_deg: f64,
    pub elevator_cmd_deg: f64,
    pub aileron_cmd_deg: f64,
    pub rudder_cmd_deg: f64,
    pub thrust: f64,
    pub attitude_reward: f64,
    pub altitude_reward: f64,
}

impl EpisodeRow {
    /// `h_ref` is `NaN`-free: pass the current altitude for attitude-only runs.
    pub fn capture(env: &AttitudeEnv, refs: AttitudeRefs, h_ref: f64, attitude_reward: f64, altitude_reward: f64) -> Self {
        let sim = env.simulator();
        let tr = TrajectoryRow::new(sim.time(), sim.state(), sim.applied_input());
        let u = env.input();
        Self {
            t: tr.t,
            h_ref,
            theta_ref_deg: refs.theta.to_degrees(),
            phi_ref_deg: refs.phi.to_degrees(),
            beta_ref_deg: 0.0,
            h: tr.h,
            theta_deg: tr.theta_deg,
            phi_deg: tr.phi_deg,
            beta_deg: tr.beta_deg,
            psi_deg: tr.psi_deg,
            alpha_deg: tr.alpha_deg,
            airspeed: tr.airspeed,
            p_dps: tr.p_dps,
            q_dps: tr.q_dps,
            r_dps: tr.r_dps,
            elevator_deg: tr.elevator_deg,
            aileron_deg: tr.aileron_deg,
            rudder_deg: tr.rudder_deg,
            elevator_cmd_deg: u[0].to_degrees(),
            aileron_cmd_deg: u[1].to_degrees(),
            rudder_cmd_deg: u[2].to_degrees(),
            thrust: tr.thrust,
            attitude_reward,
            altitude_reward,
        }
    }
}
