//! Deterministic evaluation, robustness matrix and reliability sweep.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{attitude_channels, cascade_channels, wilson_interval, EvalReport, SUCCESS_THRESHOLD};
use super::reference::ReferenceProgram;
use super::train::{train_altitude, train_attitude, TrainConfig, TrainHooks};
use crate::env::{AttitudeEnv, AttitudeRefs, CascadeEnv, EnvConfig, EpisodeRow};
use crate::error::{Error, Result};
use crate::fault::ScenarioSpec;
use crate::sac::{AgentConfig, FrozenPolicy};
use crate::sim::{Ifc, PlantConfig};
use crate::CONTROL_RATE_HZ;

/// Runs the attitude policy alone on one instantiation of `program`; reports
/// θ, φ and β.
pub fn evaluate_attitude(
    policy: &FrozenPolicy,
    plant: &PlantConfig,
    env_cfg: &EnvConfig,
    program: &ReferenceProgram,
    ifc: Ifc,
    episode: u64,
    duration: f64,
) -> Result<EvalReport> {
    if program.tracks_altitude() {
        return Err(Error::config("attitude evaluation needs a pitch-reference program"));
    }
    let mut env = AttitudeEnv::new(plant.clone(), env_cfg)?;
    let h0 = env.reset(ifc)?.h;
    let signal = program.instantiate(h0, episode, duration);
    let steps = (duration * CONTROL_RATE_HZ).round() as usize;
    let refs = |k: usize| {
        let t = k as f64 / CONTROL_RATE_HZ;
        AttitudeRefs::new(signal.theta(t).unwrap_or(0.0), signal.phi(t))
    };
    let mut rows = Vec::with_capacity(steps);
    let mut aborted = None;
    for k in 0..steps {
        let a = policy.act(&env.observe(refs(k)))?;
        let out = env.step(&a, refs(k))?;
        if out.aborted.is_some() {
            aborted = out.aborted;
            break;
        }
        rows.push(EpisodeRow::capture(&env, refs(k), h0, out.reward, 0.0));
    }
    let completed = env.time();
    Ok(EvalReport::new(program.name(), attitude_channels(&rows), aborted, completed, rows))
}

/// Runs the cascaded pair on `scenario`; reports h, φ and β.
pub fn evaluate_cascade(
    inner: &FrozenPolicy,
    outer: &FrozenPolicy,
    plant: &PlantConfig,
    env_cfg: &EnvConfig,
    scenario: &ScenarioSpec,
    label: &str,
) -> Result<EvalReport> {
    scenario.validate()?;
    if !scenario.program.tracks_altitude() {
        return Err(Error::config("cascade evaluation needs an altitude program"));
    }
    let mut env = CascadeEnv::for_scenario(plant.clone(), env_cfg, scenario)?;
    let h0 = env.state().h;
    let signal = scenario.program.instantiate(h0, 0, scenario.duration);
    let steps = (scenario.duration * CONTROL_RATE_HZ).round() as usize;
    let t = |k: usize| k as f64 / CONTROL_RATE_HZ;
    let mut rows = Vec::with_capacity(steps);
    let mut aborted = None;
    for k in 0..steps {
        let a = outer.act(&env.observe(signal.h(t(k))))?;
        let (h_ref, phi_ref) = (signal.h(t(k)), signal.phi(t(k)));
        let (out, _) = env.step(a[0], inner, h_ref, phi_ref)?;
        if out.aborted.is_some() {
            aborted = out.aborted;
            break;
        }
        let refs = AttitudeRefs::new(env.pitch_ref(), phi_ref);
        rows.push(EpisodeRow::capture(env.inner(), refs, h_ref, out.attitude_reward, out.altitude_reward));
    }
    let completed = env.time();
    Ok(EvalReport::new(label, cascade_channels(&rows), aborted, completed, rows))
}

/// One row of the robustness matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub label: String,
    pub altitude: f64,
    pub speed: f64,
    pub report: EvalReport,
}

/// The eight robustness conditions: four initial conditions on the
/// climbing-turn task, then low- and high-frequency sinusoidal and triangular
/// references at the nominal condition.
pub fn robustness_conditions() -> Vec<(String, ScenarioSpec)> {
    let base = ScenarioSpec::default();
    let mut rows = Vec::new();
    for (h, v) in [(2000.0, 90.0), (2000.0, 140.0), (5000.0, 90.0), (5000.0, 140.0)] {
        rows.push((format!("climbing_turn_{h:.0}m_{v:.0}mps"), ScenarioSpec { ifc: Ifc::new(h, v), ..base.clone() }));
    }
    for (label, program) in [
        ("sinusoidal_low", ReferenceProgram::sinusoidal_low()),
        ("sinusoidal_high", ReferenceProgram::sinusoidal_high()),
        ("triangular_low", ReferenceProgram::triangular_low()),
        ("triangular_high", ReferenceProgram::triangular_high()),
    ] {
        rows.push((label.to_string(), ScenarioSpec { program, ..base.clone() }));
    }
    rows
}

/// Evaluates every robustness condition in parallel. A row whose evaluation
/// fails is recorded as an aborted report.
pub fn robustness_matrix(inner: &FrozenPolicy, outer: &FrozenPolicy, plant: &PlantConfig, env_cfg: &EnvConfig) -> Vec<MatrixRow> {
    robustness_conditions()
        .into_par_iter()
        .map(|(label, scenario)| {
            let report = evaluate_cascade(inner, outer, plant, env_cfg, &scenario, &label)
                .unwrap_or_else(|e| EvalReport::new(&label, Vec::new(), Some(e.to_string()), 0.0, Vec::new()));
            MatrixRow { label, altitude: scenario.ifc.altitude, speed: scenario.ifc.speed, report }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub runs: usize,
    pub threshold: f64,
    pub attitude: TrainConfig,
    pub altitude: TrainConfig,
    /// Run `i` uses seed `base_seed + i`.
    pub base_seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let desk = |mut t: TrainConfig| {
            t.total_steps = 200_000;
            t.checkpoint_every = 0;
            t
        };
        Self {
            runs: 5,
            threshold: SUCCESS_THRESHOLD,
            attitude: desk(TrainConfig::attitude()),
            altitude: desk(TrainConfig::altitude()),
            base_seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::config("sweep.runs must be at least 1"));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::config("sweep.threshold must be positive"));
        }
        self.attitude.validate()?;
        self.altitude.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    pub seed: u64,
    pub nmae: f64,
    pub success: bool,
    /// Divergence or abort message, if any.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub runs: Vec<SweepRun>,
    pub success_rate: f64,
    /// 95% Wilson interval.
    pub ci_low: f64,
    pub ci_high: f64,
}

impl SweepSummary {
    pub fn from_runs(mut runs: Vec<SweepRun>) -> Self {
        runs.sort_by_key(|r| r.seed);
        let k = runs.iter().filter(|r| r.success).count();
        let n = runs.len();
        let (ci_low, ci_high) = wilson_interval(k, n, 1.959_963_984_540_054);
        Self { success_rate: if n == 0 { 0.0 } else { k as f64 / n as f64 }, runs, ci_low, ci_high }
    }
}

/// Trains one cascaded pair from scratch and scores it on the nominal task.
pub fn train_and_score(
    agents: (&AgentConfig, &AgentConfig),
    plant: &PlantConfig,
    env_cfg: &EnvConfig,
    sweep: &SweepConfig,
    seed: u64,
) -> Result<SweepRun> {
    let fail = |msg: String| SweepRun { seed, nmae: f64::INFINITY, success: false, failure: Some(msg) };
    let att = train_attitude(agents.0, plant, env_cfg, &sweep.attitude, seed, &mut TrainHooks::default())?;
    if let Some(msg) = att.diverged {
        return Ok(fail(format!("attitude stage diverged: {msg}")));
    }
    let inner = FrozenPolicy::from_agent(&att.agent);
    let alt = train_altitude(&inner, agents.1, plant, env_cfg, &sweep.altitude, seed, &mut TrainHooks::default())?;
    if let Some(msg) = alt.diverged {
        return Ok(fail(format!("altitude stage diverged: {msg}")));
    }
    let outer = FrozenPolicy::from_agent(&alt.agent);
    let report = evaluate_cascade(&inner, &outer, plant, env_cfg, &ScenarioSpec::default(), "nominal")?;
    Ok(SweepRun { seed, nmae: report.nmae, success: report.aborted.is_none() && report.nmae < sweep.threshold, failure: report.aborted })
}

/// Trains `sweep.runs` independent pairs concurrently and reports the success
/// rate with a Wilson interval.
pub fn reliability_sweep(
    agents: (&AgentConfig, &AgentConfig),
    plant: &PlantConfig,
    env_cfg: &EnvConfig,
    sweep: &SweepConfig,
) -> Result<SweepSummary> {
    sweep.validate()?;
    let runs = (0..sweep.runs as u64)
        .into_par_iter()
        .map(|i| train_and_score(agents, plant, env_cfg, sweep, sweep.base_seed + i))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepSummary::from_runs(runs))
}
