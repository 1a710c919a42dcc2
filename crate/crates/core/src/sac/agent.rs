//! Soft Actor-Critic learner.
//!
//! One [`SacAgent::train_step`] performs, in order: a critic update of both
//! online Q networks, a policy update, a temperature update, and a soft update
//! of the two target networks, each with one Adam step at the scheduled rate.

use ndarray::{concatenate, s, Array1, Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::nn::{self, AdamState, Checkpoint, GradientTape, NetworkParams, ParamGrads};
use crate::sac::config::{AgentConfig, LrSchedule};
use crate::sac::policy::{clamp_log_std, gaussian_log_density, log_one_minus_tanh_sq};
use crate::sac::replay::{Minibatch, ReplayBuffer};

pub const CHECKPOINT_KIND: &str = "sac-agent";

/// Which Q network to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QNet {
    Online1,
    Online2,
    Target1,
    Target2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicySample {
    pub action: Vec<f64>,
    pub log_prob: f64,
}

/// Critic loss and its gradients for the two online Q networks.
#[derive(Debug, Clone)]
pub struct CriticLoss {
    pub loss: f64,
    pub grads: [ParamGrads; 2],
    /// Soft Bellman targets y (no gradient flows through them).
    pub targets: Array1<f64>,
}

/// Policy objective (to be maximized) and its gradient w.r.t. θ.
#[derive(Debug, Clone)]
pub struct PolicyObjective {
    pub objective: f64,
    pub grads: ParamGrads,
    pub mean_log_prob: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureLoss {
    pub loss: f64,
    /// ∂L/∂(log η).
    pub grad_log_temperature: f64,
    pub mean_log_prob: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub step: u64,
    pub critic_loss: f64,
    pub policy_objective: f64,
    pub eta: f64,
    /// −mean log π over the policy minibatch.
    pub entropy_estimate: f64,
    pub learning_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrainStatus {
    WarmingUp { buffered: usize, required: usize },
    Updated(Diagnostics),
}

/// Batched policy evaluation with everything needed for the reparameterized
/// gradient.
struct PolicyPass {
    tape: Option<GradientTape>,
    log_std: Array2<f64>,
    log_std_free: Array2<bool>,
    noise: Array2<f64>,
    pre_squash: Array2<f64>,
    actions: Array2<f64>,
    log_probs: Array1<f64>,
}

#[derive(Debug, Clone)]
pub struct SacAgent {
    config: AgentConfig,
    policy: NetworkParams,
    q1: NetworkParams,
    q2: NetworkParams,
    target1: NetworkParams,
    target2: NetworkParams,
    log_temperature: f64,
    policy_opt: AdamState,
    q1_opt: AdamState,
    q2_opt: AdamState,
    temperature_opt: AdamState,
    rng: ChaCha8Rng,
    steps: u64,
}

impl SacAgent {
    /// Fresh agent: Xavier-initialized networks, targets synchronized with the
    /// online critics.
    pub fn new(config: AgentConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, m, l) = (config.state_dim, config.action_dim, config.hidden_units);
        let policy = nn::xavier_init_with_rng(&nn::mlp_spec(n, &[l, l], 2 * m), &mut rng)?;
        let q_spec = nn::mlp_spec(n + m, &[l, l], 1);
        let q1 = nn::xavier_init_with_rng(&q_spec, &mut rng)?;
        let q2 = nn::xavier_init_with_rng(&q_spec, &mut rng)?;
        Ok(Self {
            policy_opt: AdamState::for_network(&policy),
            q1_opt: AdamState::for_network(&q1),
            q2_opt: AdamState::for_network(&q2),
            temperature_opt: AdamState::for_shapes([1]),
            target1: q1.clone(),
            target2: q2.clone(),
            log_temperature: config.initial_log_temperature,
            policy,
            q1,
            q2,
            rng,
            steps: 0,
            config,
        })
    }

    /// Agent with caller-supplied networks (targets copied from the critics).
    pub fn from_networks(
        config: AgentConfig,
        policy: NetworkParams,
        q1: NetworkParams,
        q2: NetworkParams,
        seed: u64,
    ) -> Result<Self> {
        let mut agent = Self::new(config, seed)?;
        if !agent.policy.same_shape(&policy) || !agent.q1.same_shape(&q1) || !agent.q2.same_shape(&q2) {
            return Err(Error::shape("supplied networks do not match the agent configuration"));
        }
        agent.target1 = q1.clone();
        agent.target2 = q2.clone();
        agent.policy = policy;
        agent.q1 = q1;
        agent.q2 = q2;
        Ok(agent)
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn policy_params(&self) -> &NetworkParams {
        &self.policy
    }

    pub fn q_params(&self, which: QNet) -> &NetworkParams {
        match which {
            QNet::Online1 => &self.q1,
            QNet::Online2 => &self.q2,
            QNet::Target1 => &self.target1,
            QNet::Target2 => &self.target2,
        }
    }

    pub fn q_params_mut(&mut self, which: QNet) -> &mut NetworkParams {
        match which {
            QNet::Online1 => &mut self.q1,
            QNet::Online2 => &mut self.q2,
            QNet::Target1 => &mut self.target1,
            QNet::Target2 => &mut self.target2,
        }
    }

    pub fn policy_params_mut(&mut self) -> &mut NetworkParams {
        &mut self.policy
    }

    pub fn eta(&self) -> f64 {
        self.log_temperature.exp()
    }

    pub fn log_temperature(&self) -> f64 {
        self.log_temperature
    }

    pub fn set_log_temperature(&mut self, value: f64) {
        self.log_temperature = value;
    }

    /// Environment steps seen by [`train_step`](Self::train_step).
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn learning_rate(&self) -> f64 {
        self.config.learning_rate.at(self.steps)
    }

    pub fn set_learning_rate(&mut self, schedule: LrSchedule) {
        self.config.learning_rate = schedule;
    }

    pub fn optimizer_states(&self) -> [&AdamState; 4] {
        [&self.policy_opt, &self.q1_opt, &self.q2_opt, &self.temperature_opt]
    }

    fn check_state(&self, s: &[f64]) -> Result<()> {
        if s.len() != self.config.state_dim {
            return Err(Error::shape(format!("state has {} entries, expected {}", s.len(), self.config.state_dim)));
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric("non-finite state"));
        }
        Ok(())
    }

    /// Policy evaluation for one state. `noise = None` draws ξ from the agent's
    /// RNG; `Some(0…)` gives the deterministic action `tanh(μ)`.
    pub fn policy_sample(&mut self, s: &[f64], noise: Option<&[f64]>) -> Result<PolicySample> {
        let m = self.config.action_dim;
        let xi: Vec<f64> = match noise {
            Some(xi) => {
                if xi.len() != m {
                    return Err(Error::shape("noise width must equal the action width"));
                }
                xi.to_vec()
            }
            None => (0..m).map(|_| self.rng.sample(StandardNormal)).collect(),
        };
        self.policy_sample_with_noise(s, &xi)
    }

    /// Pure policy evaluation with explicit noise.
    pub fn policy_sample_with_noise(&self, s: &[f64], xi: &[f64]) -> Result<PolicySample> {
        self.check_state(s)?;
        let states = ArrayView2::from_shape((1, s.len()), s).expect("row");
        let noise = ArrayView2::from_shape((1, xi.len()), xi).map_err(|e| Error::shape(e.to_string()))?;
        let pass = self.policy_pass(&self.policy, states, noise, false)?;
        Ok(PolicySample { action: pass.actions.row(0).to_vec(), log_prob: pass.log_probs[0] })
    }

    /// Deterministic evaluation action `tanh(μ_θ(s))`.
    pub fn deterministic_action(&self, s: &[f64]) -> Result<Vec<f64>> {
        Ok(self.policy_sample_with_noise(s, &vec![0.0; self.config.action_dim])?.action)
    }

    pub fn q_value(&self, which: QNet, s: &[f64], a: &[f64]) -> Result<f64> {
        self.check_state(s)?;
        if a.len() != self.config.action_dim {
            return Err(Error::shape("action width mismatch"));
        }
        let input: Vec<f64> = s.iter().chain(a).copied().collect();
        Ok(nn::predict(self.q_params(which), &input)?[0])
    }

    fn policy_pass(
        &self,
        policy: &NetworkParams,
        states: ArrayView2<f64>,
        noise: ArrayView2<f64>,
        record: bool,
    ) -> Result<PolicyPass> {
        let m = self.config.action_dim;
        if noise.dim() != (states.nrows(), m) {
            return Err(Error::shape(format!(
                "noise has shape {:?}, expected ({}, {m})",
                noise.dim(),
                states.nrows()
            )));
        }
        let (out, tape) = if record {
            let (o, t) = nn::forward_batch(policy, states)?;
            (o, Some(t))
        } else {
            (nn::predict_batch(policy, states)?, None)
        };
        let b = states.nrows();
        let mean = out.slice(s![.., ..m]);
        let raw_log_std = out.slice(s![.., m..]);
        let mut log_std = Array2::zeros((b, m));
        let mut log_std_free = Array2::from_elem((b, m), true);
        let mut pre_squash = Array2::zeros((b, m));
        let mut actions = Array2::zeros((b, m));
        let mut log_probs = Array1::zeros(b);
        for i in 0..b {
            let mut lp = 0.0;
            for j in 0..m {
                let (ls, free) = clamp_log_std(raw_log_std[[i, j]], self.config.log_std_min, self.config.log_std_max);
                let xi = noise[[i, j]];
                let u = mean[[i, j]] + ls.exp() * xi;
                log_std[[i, j]] = ls;
                log_std_free[[i, j]] = free;
                pre_squash[[i, j]] = u;
                actions[[i, j]] = u.tanh();
                lp += gaussian_log_density(xi, ls) - log_one_minus_tanh_sq(u);
            }
            log_probs[i] = lp;
        }
        if log_probs.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric("non-finite policy log-density"));
        }
        Ok(PolicyPass {
            tape,
            log_std,
            log_std_free,
            noise: noise.to_owned(),
            pre_squash,
            actions,
            log_probs,
        })
    }

    /// Mean over the batch and both online critics of `(Q_i(s,a) − y)²` with
    /// `y = r + γ(min_i Q̄_i(s′,a′) − η log π(a′|s′))`, `a′` drawn from the
    /// current policy using `next_noise`.
    pub fn critic_loss(&self, batch: &Minibatch, next_noise: ArrayView2<f64>) -> Result<CriticLoss> {
        let b = batch.len();
        if b == 0 {
            return Err(Error::Usage("critic_loss needs a non-empty minibatch".into()));
        }
        let next = self.policy_pass(&self.policy, batch.next_states.view(), next_noise, false)?;
        let next_input = concatenate![Axis(1), batch.next_states, next.actions];
        let t1 = nn::predict_batch(&self.target1, next_input.view())?;
        let t2 = nn::predict_batch(&self.target2, next_input.view())?;
        let eta = self.eta();
        let gamma = self.config.discount;
        let targets = Array1::from_shape_fn(b, |i| {
            let soft = t1[[i, 0]].min(t2[[i, 0]]) - eta * next.log_probs[i];
            batch.rewards[i] + gamma * soft
        });

        let input = concatenate![Axis(1), batch.states, batch.actions];
        let mut loss = 0.0;
        let mut grads = Vec::with_capacity(2);
        for q in [&self.q1, &self.q2] {
            let (out, tape) = nn::forward_batch(q, input.view())?;
            let diff = &out.column(0) - &targets;
            loss += diff.mapv(|d| d * d).sum();
            // ∂/∂Q of (1/2B)Σ_i Σ_b (Q − y)²
            let dout = (diff / b as f64).insert_axis(Axis(1));
            grads.push(nn::backward(q, &tape, dout.view())?.0);
        }
        let loss = loss / (2.0 * b as f64);
        if !loss.is_finite() {
            return Err(Error::numeric("non-finite critic loss"));
        }
        let g2 = grads.pop().expect("two critics");
        let g1 = grads.pop().expect("two critics");
        Ok(CriticLoss { loss, grads: [g1, g2], targets })
    }

    /// Batch mean of `min_i Q_i(s, ã) − η log π(ã|s)` with the reparameterized
    /// action `ã = tanh(μ + σ ⊙ ξ)`; gradients flow through `ã` into both terms.
    pub fn policy_objective(&self, batch: &Minibatch, noise: ArrayView2<f64>) -> Result<PolicyObjective> {
        self.policy_objective_for(&self.policy, batch, noise)
    }

    fn policy_objective_for(
        &self,
        policy: &NetworkParams,
        batch: &Minibatch,
        noise: ArrayView2<f64>,
    ) -> Result<PolicyObjective> {
        let b = batch.len();
        if b == 0 {
            return Err(Error::Usage("policy_objective needs a non-empty minibatch".into()));
        }
        let (n, m) = (self.config.state_dim, self.config.action_dim);
        let pass = self.policy_pass(policy, batch.states.view(), noise, true)?;
        let input = concatenate![Axis(1), batch.states, pass.actions];
        let (o1, tape1) = nn::forward_batch(&self.q1, input.view())?;
        let (o2, tape2) = nn::forward_batch(&self.q2, input.view())?;
        let eta = self.eta();
        let inv_b = 1.0 / b as f64;

        let mut objective = 0.0;
        let mut sel1 = Array2::zeros((b, 1));
        let mut sel2 = Array2::zeros((b, 1));
        for i in 0..b {
            let (q1, q2) = (o1[[i, 0]], o2[[i, 0]]);
            if q1 <= q2 {
                sel1[[i, 0]] = inv_b;
                objective += q1;
            } else {
                sel2[[i, 0]] = inv_b;
                objective += q2;
            }
            objective -= eta * pass.log_probs[i];
        }
        objective *= inv_b;

        let (_, dx1) = nn::backward(&self.q1, &tape1, sel1.view())?;
        let (_, dx2) = nn::backward(&self.q2, &tape2, sel2.view())?;
        let dq_da = &dx1.slice(s![.., n..]) + &dx2.slice(s![.., n..]);

        // d log π/du = 2 tanh(u); d log π/d log σ = −1 (ξ held fixed)
        let mut dout = Array2::zeros((b, 2 * m));
        for i in 0..b {
            for j in 0..m {
                let u = pass.pre_squash[[i, j]];
                let a = pass.actions[[i, j]];
                let dsquash = log_one_minus_tanh_sq(u).exp();
                let du = dq_da[[i, j]] * dsquash - eta * inv_b * 2.0 * a;
                dout[[i, j]] = du;
                if pass.log_std_free[[i, j]] {
                    let sigma = pass.log_std[[i, j]].exp();
                    dout[[i, m + j]] = du * sigma * pass.noise[[i, j]] + eta * inv_b;
                }
            }
        }
        let tape = pass.tape.as_ref().expect("recorded");
        let (grads, _) = nn::backward(policy, tape, dout.view())?;
        if !objective.is_finite() {
            return Err(Error::numeric("non-finite policy objective"));
        }
        Ok(PolicyObjective { objective, grads, mean_log_prob: pass.log_probs.mean().unwrap_or(0.0) })
    }

    /// `L(η) = mean(−η log π(a|s) − η H̄)` with actions drawn from the current
    /// policy; the gradient is taken w.r.t. log η.
    pub fn temperature_loss(&self, batch: &Minibatch, noise: ArrayView2<f64>) -> Result<TemperatureLoss> {
        if batch.is_empty() {
            return Err(Error::Usage("temperature_loss needs a non-empty minibatch".into()));
        }
        let pass = self.policy_pass(&self.policy, batch.states.view(), noise, false)?;
        Ok(self.temperature_loss_from_log_probs(pass.log_probs.view()))
    }

    /// Temperature loss for given log-densities.
    pub fn temperature_loss_from_log_probs(&self, log_probs: ndarray::ArrayView1<f64>) -> TemperatureLoss {
        let eta = self.eta();
        let target = self.config.entropy_target();
        let mean_lp = log_probs.mean().unwrap_or(0.0);
        let loss = log_probs.iter().map(|lp| -eta * lp - eta * target).sum::<f64>() / log_probs.len() as f64;
        // L is linear in η and dη/d(log η) = η, so ∂L/∂(log η) = L
        TemperatureLoss { loss, grad_log_temperature: loss, mean_log_prob: mean_lp }
    }

    /// `k̄_i ← (1 − τ)·k_i + τ·k̄_i`.
    pub fn soft_update(&mut self) -> Result<()> {
        let tau = self.config.smoothing;
        self.target1.blend_towards(&self.q1, tau)?;
        self.target2.blend_towards(&self.q2, tau)
    }

    fn draw_noise(&mut self, rows: usize) -> Array2<f64> {
        let m = self.config.action_dim;
        let rng = &mut self.rng;
        Array2::from_shape_simple_fn((rows, m), || rng.sample(StandardNormal))
    }

    /// One interleaved update; skipped (warming up) until the buffer holds a
    /// full minibatch. Every call advances the step counter.
    pub fn train_step(&mut self, buffer: &ReplayBuffer) -> Result<TrainStatus> {
        let required = self.config.batch_size;
        if buffer.len() < required {
            self.steps += 1;
            return Ok(TrainStatus::WarmingUp { buffered: buffer.len(), required });
        }
        let lr = self.learning_rate();
        let batch = buffer.sample(required, &mut self.rng)?;

        let noise = self.draw_noise(required);
        let critic = self.critic_loss(&batch, noise.view())?;
        let [g1, g2] = critic.grads;
        self.q1_opt.step(&mut self.q1, &g1, lr)?;
        self.q2_opt.step(&mut self.q2, &g2, lr)?;

        let noise = self.draw_noise(required);
        let policy = self.policy_objective(&batch, noise.view())?;
        let mut ascent = policy.grads;
        ascent.scale(-1.0);
        self.policy_opt.step(&mut self.policy, &ascent, lr)?;

        let noise = self.draw_noise(required);
        let temp = self.temperature_loss(&batch, noise.view())?;
        self.temperature_opt
            .step_scalar(&mut self.log_temperature, temp.grad_log_temperature, lr)?;

        self.soft_update()?;
        self.steps += 1;
        Ok(TrainStatus::Updated(Diagnostics {
            step: self.steps,
            critic_loss: critic.loss,
            policy_objective: policy.objective,
            eta: self.eta(),
            entropy_estimate: -policy.mean_log_prob,
            learning_rate: lr,
        }))
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        let mut ckpt = Checkpoint::new(CHECKPOINT_KIND);
        let c = &self.config;
        ckpt.put_u64(
            "config.dims",
            &[5],
            vec![c.state_dim as u64, c.action_dim as u64, c.hidden_units as u64, c.batch_size as u64, c.buffer_capacity as u64],
        );
        ckpt.put_f64(
            "config.scalars",
            &[6],
            vec![
                c.discount,
                c.smoothing,
                c.entropy_target,
                c.initial_log_temperature,
                c.log_std_min,
                c.log_std_max,
            ],
        );
        let lr = match c.learning_rate {
            LrSchedule::Constant { value } => vec![0.0, value, value, 0.0],
            LrSchedule::Linear { start, end, total_steps } => vec![1.0, start, end, total_steps as f64],
        };
        ckpt.put_f64("config.learning_rate", &[4], lr);
        self.policy.write_checkpoint(&mut ckpt, "policy");
        self.q1.write_checkpoint(&mut ckpt, "q1");
        self.q2.write_checkpoint(&mut ckpt, "q2");
        self.target1.write_checkpoint(&mut ckpt, "target1");
        self.target2.write_checkpoint(&mut ckpt, "target2");
        self.policy_opt.write_checkpoint(&mut ckpt, "adam.policy");
        self.q1_opt.write_checkpoint(&mut ckpt, "adam.q1");
        self.q2_opt.write_checkpoint(&mut ckpt, "adam.q2");
        self.temperature_opt.write_checkpoint(&mut ckpt, "adam.temperature");
        ckpt.put_f64("log_temperature", &[1], vec![self.log_temperature]);
        ckpt.put_u64("steps", &[1], vec![self.steps]);
        let seed = self.rng.get_seed();
        let seed_words: Vec<u64> = seed.chunks(8).map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        let pos = self.rng.get_word_pos();
        ckpt.put_u64(
            "rng",
            &[7],
            [seed_words, vec![self.rng.get_stream(), pos as u64, (pos >> 64) as u64]].concat(),
        );
        ckpt
    }

    pub fn from_checkpoint(ckpt: &Checkpoint) -> Result<Self> {
        if ckpt.kind != CHECKPOINT_KIND {
            return Err(Error::Checkpoint(format!("expected a `{CHECKPOINT_KIND}` checkpoint, found `{}`", ckpt.kind)));
        }
        let (_, dims) = ckpt.get_u64("config.dims")?;
        let (_, sc) = ckpt.get_f64("config.scalars")?;
        let (_, lr) = ckpt.get_f64("config.learning_rate")?;
        if dims.len() != 5 || sc.len() != 6 || lr.len() != 4 {
            return Err(Error::Checkpoint("malformed agent configuration entries".into()));
        }
        let learning_rate = if lr[0] == 0.0 {
            LrSchedule::Constant { value: lr[1] }
        } else {
            LrSchedule::Linear { start: lr[1], end: lr[2], total_steps: lr[3] as u64 }
        };
        let config = AgentConfig {
            state_dim: dims[0] as usize,
            action_dim: dims[1] as usize,
            hidden_units: dims[2] as usize,
            batch_size: dims[3] as usize,
            buffer_capacity: dims[4] as usize,
            discount: sc[0],
            smoothing: sc[1],
            entropy_target: sc[2],
            initial_log_temperature: sc[3],
            log_std_min: sc[4],
            log_std_max: sc[5],
            learning_rate,
        };
        let mut agent = Self::new(config, 0).map_err(|e| Error::Checkpoint(e.to_string()))?;
        let load = |name: &str, like: &NetworkParams| -> Result<NetworkParams> {
            let p = NetworkParams::read_checkpoint(ckpt, name)?;
            if !p.same_shape(like) {
                return Err(Error::Checkpoint(format!("`{name}` does not match the stored configuration")));
            }
            Ok(p)
        };
        agent.policy = load("policy", &agent.policy)?;
        agent.q1 = load("q1", &agent.q1)?;
        agent.q2 = load("q2", &agent.q2)?;
        agent.target1 = load("target1", &agent.target1)?;
        agent.target2 = load("target2", &agent.target2)?;
        agent.policy_opt = AdamState::read_checkpoint(ckpt, "adam.policy", &agent.policy_opt)?;
        agent.q1_opt = AdamState::read_checkpoint(ckpt, "adam.q1", &agent.q1_opt)?;
        agent.q2_opt = AdamState::read_checkpoint(ckpt, "adam.q2", &agent.q2_opt)?;
        agent.temperature_opt = AdamState::read_checkpoint(ckpt, "adam.temperature", &agent.temperature_opt)?;
        agent.log_temperature = ckpt.get_scalar_f64("log_temperature")?;
        agent.steps = ckpt.get_scalar_u64("steps")?;
        let (_, rng) = ckpt.get_u64("rng")?;
        if rng.len() != 7 {
            return Err(Error::Checkpoint("malformed RNG state".into()));
        }
        let mut seed = [0u8; 32];
        for (i, w) in rng[..4].iter().enumerate() {
            seed[i * 8..(i + 1) * 8].copy_from_slice(&w.to_le_bytes());
        }
        let mut r = ChaCha8Rng::from_seed(seed);
        r.set_stream(rng[4]);
        r.set_word_pos(rng[5] as u128 | ((rng[6] as u128) << 64));
        agent.rng = r;
        Ok(agent)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        self.to_checkpoint().save(path)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_checkpoint(&Checkpoint::load(path)?)
    }

    /// Exact structural equality of every parameter set, optimizer state,
    /// temperature, and step counter.
    pub fn same_state(&self, other: &Self) -> bool {
        self.policy == other.policy
            && self.q1 == other.q1
            && self.q2 == other.q2
            && self.target1 == other.target1
            && self.target2 == other.target2
            && self.optimizer_states() == other.optimizer_states()
            && self.log_temperature.to_bits() == other.log_temperature.to_bits()
            && self.steps == other.steps
    }
}

/// Frozen deterministic policy, cheap to clone and share.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenPolicy {
    params: NetworkParams,
    action_dim: usize,
}

impl FrozenPolicy {
    pub fn from_agent(agent: &SacAgent) -> Self {
        Self { params: agent.policy.clone(), action_dim: agent.config.action_dim }
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    /// `tanh(μ_θ(s))`.
    pub fn act(&self, s: &[f64]) -> Result<Vec<f64>> {
        let out = nn::predict(&self.params, s)?;
        Ok(out[..self.action_dim].iter().map(|v| v.tanh()).collect())
    }
}
