//! Stage-wise training: attitude first, then altitude with the attitude
//! policy frozen in the inner loop.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::metrics::smooth;
use super::reference::ReferenceProgram;
use crate::env::{AttitudeEnv, AttitudeRefs, CascadeEnv, EnvConfig};
use crate::error::{Error, Result};
use crate::sac::{AgentConfig, FrozenPolicy, LrSchedule, ReplayBuffer, SacAgent, TrainStatus};
use crate::sim::{Ifc, PlantConfig};
use crate::CONTROL_RATE_HZ;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Attitude,
    Altitude,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Attitude => "attitude",
            Stage::Altitude => "altitude",
        }
    }
}

impl std::str::FromStr for Stage {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "attitude" => Ok(Stage::Attitude),
            "altitude" => Ok(Stage::Altitude),
            _ => Err(Error::config(format!("unknown stage `{s}` (expected attitude or altitude)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub total_steps: u64,
    /// s.
    pub episode_duration: f64,
    /// Checkpoint cadence in steps; 0 keeps only the final checkpoint.
    pub checkpoint_every: u64,
    pub smoothing_window: usize,
    /// Reseeded from the run seed.
    pub program: ReferenceProgram,
    pub ifc: Ifc,
    /// Stretch a linear learning-rate schedule over `total_steps`.
    pub tie_lr_schedule: bool,
}

impl TrainConfig {
    pub fn attitude() -> Self {
        Self {
            total_steps: 1_000_000,
            episode_duration: ReferenceProgram::ATTITUDE_EPISODE_DURATION,
            checkpoint_every: 100_000,
            smoothing_window: 20,
            program: ReferenceProgram::attitude_steps(),
            ifc: Ifc::default(),
            tie_lr_schedule: true,
        }
    }

    pub fn altitude() -> Self {
        Self {
            episode_duration: 120.0,
            program: ReferenceProgram::altitude_random(),
            ..Self::attitude()
        }
    }

    pub fn for_stage(stage: Stage) -> Self {
        match stage {
            Stage::Attitude => Self::attitude(),
            Stage::Altitude => Self::altitude(),
        }
    }

    pub fn episode_steps(&self) -> usize {
        (self.episode_duration * CONTROL_RATE_HZ).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_steps == 0 {
            return Err(Error::config("train.total_steps must be positive"));
        }
        if !(self.episode_duration > 0.0 && self.episode_duration.is_finite()) {
            return Err(Error::config("train.episode_duration must be positive"));
        }
        if self.smoothing_window == 0 {
            return Err(Error::config("train.smoothing_window must be positive"));
        }
        self.ifc.validate()?;
        self.program.validate()
    }
}

/// One point of the learning curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    /// Cumulative environment steps at episode end.
    pub steps: u64,
    pub length: usize,
    pub reward_sum: f64,
    pub smoothed: f64,
    pub aborted: bool,
    pub eta: f64,
    pub critic_loss: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub stage: Stage,
    pub agent: SacAgent,
    pub curve: Vec<EpisodeRecord>,
    /// Reason the run stopped early on a non-finite value.
    pub diverged: Option<String>,
    pub steps: u64,
}

impl TrainOutcome {
    pub fn smoothed_returns(&self, window: usize) -> Vec<f64> {
        smooth(&self.curve.iter().map(|r| r.reward_sum).collect::<Vec<_>>(), window)
    }
}

/// Where checkpoints go and who hears about progress.
#[derive(Default)]
pub struct TrainHooks<'a> {
    pub checkpoint_dir: Option<PathBuf>,
    pub on_episode: Option<&'a mut dyn FnMut(&EpisodeRecord)>,
}

fn prepare_agent(mut cfg: AgentConfig, train: &TrainConfig, seed: u64) -> Result<SacAgent> {
    if train.tie_lr_schedule {
        if let LrSchedule::Linear { total_steps, .. } = &mut cfg.learning_rate {
            *total_steps = train.total_steps;
        }
    }
    SacAgent::new(cfg, seed)
}

fn checkpoint_path(dir: &Path, stage: Stage, tag: &str) -> PathBuf {
    dir.join(format!("{}_{tag}.ckpt", stage.name()))
}

struct Loop<'a, 'h> {
    stage: Stage,
    train: &'a TrainConfig,
    hooks: &'a mut TrainHooks<'h>,
    curve: Vec<EpisodeRecord>,
    returns: Vec<f64>,
    total: u64,
    last_critic: f64,
}

impl Loop<'_, '_> {
    fn learn(&mut self, agent: &mut SacAgent, buffer: &ReplayBuffer) -> Result<()> {
        match agent.train_step(buffer)? {
            TrainStatus::Updated(d) => {
                if !d.critic_loss.is_finite() || !d.policy_objective.is_finite() || !d.eta.is_finite() {
                    return Err(Error::numeric(format!("non-finite loss at step {}", d.step)));
                }
                self.last_critic = d.critic_loss;
            }
            TrainStatus::WarmingUp { .. } => {}
        }
        self.total += 1;
        if let Some(dir) = &self.hooks.checkpoint_dir {
            if self.train.checkpoint_every > 0 && self.total % self.train.checkpoint_every == 0 {
                agent.save(checkpoint_path(dir, self.stage, &format!("{:08}", self.total)))?;
            }
        }
        Ok(())
    }

    fn end_episode(&mut self, agent: &SacAgent, length: usize, reward_sum: f64, aborted: bool) {
        self.returns.push(reward_sum);
        let w = self.train.smoothing_window.min(self.returns.len());
        let smoothed = self.returns[self.returns.len() - w..].iter().sum::<f64>() / w as f64;
        let rec = EpisodeRecord {
            episode: self.curve.len(),
            steps: self.total,
            length,
            reward_sum,
            smoothed,
            aborted,
            eta: agent.eta(),
            critic_loss: self.last_critic,
        };
        if let Some(cb) = self.hooks.on_episode.as_mut() {
            cb(&rec);
        }
        self.curve.push(rec);
    }

    fn finish(self, agent: SacAgent, diverged: Option<String>) -> Result<TrainOutcome> {
        if let Some(dir) = &self.hooks.checkpoint_dir {
            let tag = if diverged.is_some() { "diverged" } else { "final" };
            agent.save(checkpoint_path(dir, self.stage, tag))?;
        }
        Ok(TrainOutcome { stage: self.stage, agent, curve: self.curve, diverged, steps: self.total })
    }
}

fn divergence(e: Error) -> Result<String> {
    match e {
        Error::Numeric(msg) => Ok(msg),
        other => Err(other),
    }
}

/// Trains the attitude agent on randomized step references.
pub fn train_attitude(
    agent_cfg: &AgentConfig,
    plant: &PlantConfig,
    env_cfg: &EnvConfig,
    train: &TrainConfig,
    seed: u64,
    hooks: &mut TrainHooks<'_>,
) -> Result<TrainOutcome> {
    train.validate()?;
    if let Some(dir) = &hooks.checkpoint_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut agent = prepare_agent(agent_cfg.clone(), train, seed)?;
    let mut buffer = ReplayBuffer::new(agent_cfg.state_dim, agent_cfg.action_dim, agent_cfg.buffer_capacity)?;
    let mut env = AttitudeEnv::new(plant.clone(), env_cfg)?;
    let program = train.program.with_seed(seed);
    let steps = train.episode_steps();
    let mut lp = Loop { stage: Stage::Attitude, train, hooks, curve: Vec::new(), returns: Vec::new(), total: 0, last_critic: f64::NAN };

    let mut episode = 0u64;
    let diverged = 'run: loop {
        if lp.total >= train.total_steps || episode >= train.total_steps {
            break None;
        }
        let h0 = env.reset(train.ifc)?.h;
        let signal = program.instantiate(h0, episode, train.episode_duration);
        episode += 1;
        let refs = |k: usize| {
            let t = k as f64 / CONTROL_RATE_HZ;
            AttitudeRefs::new(signal.theta(t).unwrap_or(0.0), signal.phi(t))
        };
        let mut s = env.observe(refs(0));
        let (mut sum, mut len, mut aborted) = (0.0, 0, false);
        for k in 0..steps {
            let a = agent.policy_sample(&s, None)?.action;
            let out = match env.step(&a, refs(k)) {
                Ok(o) => o,
                Err(e) => break 'run Some(divergence(e)?),
            };
            if out.aborted.is_some() {
                aborted = true;
                break;
            }
            let s2 = env.observe(refs(k + 1));
            buffer.push_parts(&s, &a, out.reward, &s2)?;
            sum += out.reward;
            len += 1;
            s = s2;
            if let Err(e) = lp.learn(&mut agent, &buffer) {
                break 'run Some(divergence(e)?);
            }
            if lp.total >= train.total_steps {
                break;
            }
        }
        lp.end_episode(&agent, len, sum, aborted);
    };
    lp.finish(agent, diverged)
}

/// Trains the altitude agent with `inner` fixed in the loop.
pub fn train_altitude(
    inner: &FrozenPolicy,
    agent_cfg: &AgentConfig,
    plant: &PlantConfig,
    env_cfg: &EnvConfig,
    train: &TrainConfig,
    seed: u64,
    hooks: &mut TrainHooks<'_>,
) -> Result<TrainOutcome> {
    train.validate()?;
    if let Some(dir) = &hooks.checkpoint_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut agent = prepare_agent(agent_cfg.clone(), train, seed)?;
    let mut buffer = ReplayBuffer::new(agent_cfg.state_dim, agent_cfg.action_dim, agent_cfg.buffer_capacity)?;
    let mut env = CascadeEnv::new(AttitudeEnv::new(plant.clone(), env_cfg)?, env_cfg)?;
    let program = train.program.with_seed(seed);
    let steps = train.episode_steps();
    let mut lp = Loop { stage: Stage::Altitude, train, hooks, curve: Vec::new(), returns: Vec::new(), total: 0, last_critic: f64::NAN };

    let mut episode = 0u64;
    let diverged = 'run: loop {
        if lp.total >= train.total_steps || episode >= train.total_steps {
            break None;
        }
        let h0 = env.reset(train.ifc)?.h;
        let signal = program.instantiate(h0, episode, train.episode_duration);
        episode += 1;
        let t = |k: usize| k as f64 / CONTROL_RATE_HZ;
        let mut s = env.observe(signal.h(0.0));
        let (mut sum, mut len, mut aborted) = (0.0, 0, false);
        for k in 0..steps {
            let a = agent.policy_sample(&s, None)?.action;
            let out = match env.step(a[0], inner, signal.h(t(k)), signal.phi(t(k))) {
                Ok((o, _)) => o,
                Err(e) => break 'run Some(divergence(e)?),
            };
            if out.aborted.is_some() {
                aborted = true;
                break;
            }
            let s2 = env.observe(signal.h(t(k + 1)));
            buffer.push_parts(&s, &a, out.altitude_reward, &s2)?;
            sum += out.altitude_reward;
            len += 1;
            s = s2;
            if let Err(e) = lp.learn(&mut agent, &buffer) {
                break 'run Some(divergence(e)?);
            }
            if lp.total >= train.total_steps {
                break;
            }
        }
        lp.end_episode(&agent, len, sum, aborted);
    };
    lp.finish(agent, diverged)
}
