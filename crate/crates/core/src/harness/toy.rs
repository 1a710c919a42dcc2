//! Double-integrator tracking task for checking the learner in isolation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sac::{AgentConfig, LrSchedule, ReplayBuffer, SacAgent};

/// Position `x` tracks zero under bounded acceleration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyEnv {
    pub x: f64,
    pub v: f64,
    steps: usize,
}

impl ToyEnv {
    pub const DT: f64 = 0.05;
    pub const EPISODE_STEPS: usize = 200;
    pub const MAX_ACCEL: f64 = 1.0;

    pub fn new(x: f64, v: f64) -> Self {
        Self { x, v, steps: 0 }
    }

    /// `[position error, velocity]`.
    pub fn observe(&self) -> [f64; 2] {
        [-self.x, self.v]
    }

    /// Exact zero-order-hold step; returns `(reward, done)`.
    pub fn step(&mut self, action: f64) -> (f64, bool) {
        let a = action.clamp(-1.0, 1.0) * Self::MAX_ACCEL;
        self.x += self.v * Self::DT + 0.5 * a * Self::DT * Self::DT;
        self.v += a * Self::DT;
        self.steps += 1;
        (-self.x.abs().clamp(0.0, 1.0), self.steps >= Self::EPISODE_STEPS)
    }

    /// Fixed evaluation initial conditions `(x, v)`.
    pub fn eval_conditions() -> [(f64, f64); 10] {
        [
            (-2.0, 0.0),
            (-1.5, 0.5),
            (-1.0, -0.5),
            (-0.5, 1.0),
            (0.0, 1.0),
            (0.5, -1.0),
            (1.0, 0.5),
            (1.5, -0.5),
            (2.0, 0.0),
            (0.25, 0.25),
        ]
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::new(rng.gen_range(-2.0..=2.0), rng.gen_range(-1.0..=1.0))
    }
}

/// Mean episode return of `policy` over the fixed evaluation conditions.
pub fn toy_eval_return(mut policy: impl FnMut([f64; 2]) -> f64) -> f64 {
    let ics = ToyEnv::eval_conditions();
    let mut total = 0.0;
    for (x, v) in ics {
        let mut env = ToyEnv::new(x, v);
        loop {
            let (r, done) = env.step(policy(env.observe()));
            total += r;
            if done {
                break;
            }
        }
    }
    total / ics.len() as f64
}

/// Best saturated linear state feedback `a = clip(k₁e − k₂v)` found by grid
/// search; returns `(return, k₁, k₂)`.
pub fn toy_oracle() -> (f64, f64, f64) {
    let gains: Vec<f64> = (0..61).map(|i| 10f64.powf(-1.0 + 3.0 * i as f64 / 60.0)).collect();
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for &k1 in &gains {
        for &k2 in &gains {
            let r = toy_eval_return(|[e, v]| k1 * e - k2 * v);
            if r > best.0 {
                best = (r, k1, k2);
            }
        }
    }
    best
}

pub fn toy_agent_config() -> AgentConfig {
    AgentConfig {
        state_dim: 2,
        action_dim: 1,
        hidden_units: 64,
        learning_rate: LrSchedule::Constant { value: 3e-4 },
        ..AgentConfig::altitude()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyResult {
    pub seed: u64,
    pub episode_returns: Vec<f64>,
    pub eval_return: f64,
    pub oracle_return: f64,
    /// Returns are negative, so reaching 90% of the oracle means
    /// `eval_return ≥ oracle_return / 0.9`.
    pub threshold: f64,
    pub pass: bool,
}

/// Trains a fresh agent for `steps` environment steps and scores its
/// deterministic policy against the oracle.
pub fn toy_benchmark(seed: u64, steps: u64) -> Result<ToyResult> {
    let cfg = toy_agent_config();
    let mut agent = SacAgent::new(cfg.clone(), seed)?;
    let mut buffer = ReplayBuffer::new(2, 1, cfg.buffer_capacity)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x746f_79);
    let mut returns = Vec::new();
    let mut env = ToyEnv::random(&mut rng);
    let mut sum = 0.0;
    for _ in 0..steps {
        let s = env.observe();
        let a = agent.policy_sample(&s, None)?.action;
        let (r, done) = env.step(a[0]);
        buffer.push_parts(&s, &a, r, &env.observe())?;
        agent.train_step(&buffer)?;
        sum += r;
        if done {
            returns.push(sum);
            sum = 0.0;
            env = ToyEnv::random(&mut rng);
        }
    }
    let eval_return = toy_eval_return(|s| agent.deterministic_action(&s).map(|a| a[0]).unwrap_or(0.0));
    let (oracle_return, _, _) = toy_oracle();
    let threshold = oracle_return / 0.9;
    Ok(ToyResult { seed, episode_returns: returns, eval_return, oracle_return, threshold, pass: eval_return >= threshold })
}
