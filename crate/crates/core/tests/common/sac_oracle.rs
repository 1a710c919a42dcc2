//! Scalar re-implementation of the three SAC losses on small fixtures.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sacflight::nn::NetworkParams;
use sacflight::sac::{AgentConfig, LrSchedule, Minibatch, QNet, SacAgent};

pub struct Fixture {
    pub agent: SacAgent,
    pub batch: Minibatch,
    pub noise: Array2<f64>,
}

/// Agent with random networks (distinct targets) and a 3-sample minibatch.
pub fn fixture(n: usize, m: usize, hidden: usize, seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = AgentConfig {
        state_dim: n,
        action_dim: m,
        hidden_units: hidden,
        discount: 0.9,
        initial_log_temperature: -0.7,
        entropy_target: -(m as f64),
        batch_size: 3,
        buffer_capacity: 10,
        learning_rate: LrSchedule::Constant { value: 1e-3 },
        ..AgentConfig::altitude()
    };
    let policy = super::perturbed_network(n, &[hidden, hidden], 2 * m, &mut rng);
    let q1 = super::perturbed_network(n + m, &[hidden, hidden], 1, &mut rng);
    let q2 = super::perturbed_network(n + m, &[hidden, hidden], 1, &mut rng);
    let mut agent = SacAgent::from_networks(config, policy, q1, q2, seed).unwrap();
    // targets distinct from the online critics
    let t1 = super::perturbed_network(n + m, &[hidden, hidden], 1, &mut rng);
    let t2 = super::perturbed_network(n + m, &[hidden, hidden], 1, &mut rng);
    *agent_target(&mut agent, 1) = t1;
    *agent_target(&mut agent, 2) = t2;
    let b = 3;
    let mut u = |r: usize, c: usize| Array2::from_shape_fn((r, c), |_| rng.gen_range(-1.0..1.0));
    let batch = Minibatch {
        states: u(b, n),
        actions: u(b, m).mapv(|a| 0.9 * a),
        rewards: Array1::from_vec(vec![-0.2, -0.7, 0.1]),
        next_states: u(b, n),
    };
    let noise = u(b, m).mapv(|x| 1.5 * x);
    Fixture { agent, batch, noise }
}

pub fn agent_target(agent: &mut SacAgent, which: u8) -> &mut NetworkParams {
    agent.q_params_mut(if which == 1 { QNet::Target1 } else { QNet::Target2 })
}

pub fn bounds(c: &AgentConfig) -> (f64, f64) {
    (c.log_std_min, c.log_std_max)
}

pub fn row(a: &Array2<f64>, i: usize) -> Vec<f64> {
    a.row(i).to_vec()
}

pub fn critic_oracle(f: &Fixture, q1: &NetworkParams, q2: &NetworkParams) -> f64 {
    let a = &f.agent;
    let c = a.config();
    let b = f.batch.len();
    let mut loss = 0.0;
    for i in 0..b {
        let sn = row(&f.batch.next_states, i);
        let (an, lp) = super::policy_sample(a.policy_params(), &sn, &row(&f.noise, i), bounds(c));
        let t1 = super::q_forward(a.q_params(QNet::Target1), &sn, &an);
        let t2 = super::q_forward(a.q_params(QNet::Target2), &sn, &an);
        let y = f.batch.rewards[i] + c.discount * (t1.min(t2) - a.eta() * lp);
        let (s, act) = (row(&f.batch.states, i), row(&f.batch.actions, i));
        for q in [q1, q2] {
            let d = super::q_forward(q, &s, &act) - y;
            loss += d * d;
        }
    }
    loss / (2.0 * b as f64)
}

pub fn policy_oracle(f: &Fixture, policy: &NetworkParams) -> f64 {
    let a = &f.agent;
    let b = f.batch.len();
    let mut total = 0.0;
    for i in 0..b {
        let s = row(&f.batch.states, i);
        let (act, lp) = super::policy_sample(policy, &s, &row(&f.noise, i), bounds(a.config()));
        let q = super::q_forward(a.q_params(QNet::Online1), &s, &act)
            .min(super::q_forward(a.q_params(QNet::Online2), &s, &act));
        total += q - a.eta() * lp;
    }
    total / b as f64
}

pub fn temperature_oracle(f: &Fixture) -> f64 {
    let a = &f.agent;
    let b = f.batch.len();
    let target = a.config().entropy_target;
    (0..b)
        .map(|i| {
            let (_, lp) = super::policy_sample(
                a.policy_params(),
                &row(&f.batch.states, i),
                &row(&f.noise, i),
                bounds(a.config()),
            );
            -a.eta() * lp - a.eta() * target
        })
        .sum::<f64>()
        / b as f64
}

