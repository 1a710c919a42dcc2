//! Measurements behind the simulator, failure and noise properties, shared by
//! the per-module tests and the acceptance target.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sacflight::fault::{observe, FailureKind, FailureSpec, GustSpec, Measurement, NoiseSpec, ScenarioSpec};
use sacflight::sim::{rk4_step, trim, ActuatorState, AircraftState, ControlInput, Ifc, PlantConfig, Simulator};
use sacflight::DT;

/// Largest |v|, |p|, |r|, |φ|, |ψ|, |y| over `seconds` of elevator-only flight
/// from a wings-level start.
pub fn symmetric_flight_lateral_max(seconds: f64) -> f64 {
    let mut sim = Simulator::new(PlantConfig::default()).unwrap();
    sim.reset(Ifc::default()).unwrap();
    let mut worst = 0.0f64;
    let steps = (seconds / DT).round() as usize;
    for k in 0..steps {
        let de = -0.02 + 0.03 * (0.5 * k as f64 * DT).sin();
        let s = sim.step([de, 0.0, 0.0]).unwrap();
        for v in [s.v, s.p, s.r, s.phi, s.psi, s.y_e] {
            worst = worst.max(v.abs());
        }
    }
    worst
}

fn hold_norm(a: &AircraftState, b: &AircraftState) -> f64 {
    // position along the flight path grows by design
    let (x, y) = (a.to_array(), b.to_array());
    (0..10).map(|i| (x[i] - y[i]).powi(2)).sum::<f64>().sqrt()
}

/// Largest ‖state − trim‖ (all states except horizontal position) while
/// holding trim surfaces and thrust for `seconds`.
pub fn trim_hold_drift(seconds: f64) -> f64 {
    let plant = PlantConfig::default();
    let tp = trim(&plant.aero, 2000.0, 90.0).unwrap();
    let mut sim = Simulator::new(plant).unwrap();
    sim.reset_to_state(tp.state, [tp.elevator, 0.0, 0.0], Some(tp.thrust)).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..(seconds / DT).round() as usize {
        let s = sim.step([tp.elevator, 0.0, 0.0]).unwrap();
        worst = worst.max(hold_norm(&s, &tp.state));
    }
    worst
}

fn integrate(s0: AircraftState, input: &ControlInput, plant: &PlantConfig, dt: f64, t_end: f64) -> AircraftState {
    let n = (t_end / dt).round() as usize;
    let mut s = s0;
    for _ in 0..n {
        s = rk4_step(&s, input, &plant.aero, 0.0, dt).unwrap();
    }
    s
}

/// Observed convergence orders of the RK4 step for halving step sizes on a
/// 2 s manoeuvre with all surfaces deflected.
pub fn rk4_orders() -> Vec<f64> {
    let plant = PlantConfig::default();
    let s0 = AircraftState { p: 0.1, q: 0.05, r: -0.02, w: 4.0, v: 1.0, phi: 0.2, theta: 0.05, ..AircraftState::level(2000.0, 90.0) };
    let input = ControlInput { elevator: -0.05, aileron: 0.04, rudder: -0.03, thrust: 4000.0 };
    let t_end = 2.0;
    let reference = integrate(s0, &input, &plant, 0.04 / 64.0, t_end);
    let err = |dt: f64| {
        let s = integrate(s0, &input, &plant, dt, t_end);
        let (a, b) = (s.to_array(), reference.to_array());
        (0..10).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
    };
    let errors: Vec<f64> = [0.04, 0.02, 0.01].into_iter().map(err).collect();
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Time at which a step command reaches 1 − e⁻¹ of its final value,
/// interpolating linearly between samples.
pub fn actuator_rise_time(time_constant: f64) -> f64 {
    let plant = PlantConfig::default();
    let mut act = ActuatorState::new(plant.actuators.limits(), time_constant, DT);
    let target = 0.1;
    let level = target * (1.0 - (-1.0f64).exp());
    let mut prev = 0.0;
    for k in 1..100_000 {
        let x = act.advance([0.0, target, 0.0])[1];
        if x >= level {
            return (k as f64 - 1.0 + (level - prev) / (x - prev)) * DT;
        }
        prev = x;
    }
    f64::INFINITY
}

fn excitation(k: usize) -> [f64; 3] {
    let t = k as f64 * DT;
    [-0.03 + 0.06 * (0.7 * t).sin(), 0.05 * (1.3 * t).sin(), 0.04 * (0.9 * t).cos()]
}

/// Runs the excitation sequence with and without the preset failure and
/// reports whether every state before onset is bitwise identical, along
/// with the applied inputs after onset.
pub fn failure_run(kind: FailureKind, seconds: f64) -> (bool, Vec<(f64, ControlInput)>) {
    let spec = FailureSpec::preset(kind);
    let plant = PlantConfig::default();
    let mut clean = Simulator::new(plant.clone()).unwrap();
    let mut failed = Simulator::with_disturbances(plant, spec.clone(), GustSpec::default()).unwrap();
    clean.reset(Ifc::default()).unwrap();
    failed.reset(Ifc::default()).unwrap();
    let mut identical = true;
    let mut after = Vec::new();
    for k in 0..(seconds / DT).round() as usize {
        let t = failed.time();
        let cmd = excitation(k);
        let b = match failed.step(cmd) {
            Ok(s) => s,
            Err(_) => break,
        };
        if t < spec.onset {
            let a = clean.step(cmd).unwrap();
            identical &= a.to_array().iter().zip(b.to_array()).all(|(x, y)| x.to_bits() == y.to_bits());
        } else {
            after.push((t, *failed.applied_input()));
        }
    }
    (identical, after)
}

/// Commands that push the elevator beyond ±2.5°.
pub fn elevator_range_run(seconds: f64) -> Vec<f64> {
    let mut sim = scenario_simulator("elevator_range");
    let mut applied = Vec::new();
    for k in 0..(seconds / DT).round() as usize {
        let t = sim.time();
        let de = 0.15 * (2.0 * k as f64 * DT).sin();
        if sim.step([de, 0.0, 0.0]).is_err() {
            break;
        }
        if t >= 10.0 {
            applied.push(sim.applied_input().elevator);
        }
    }
    applied
}

fn scenario_simulator(name: &str) -> Simulator {
    let sc = ScenarioSpec::preset(name).unwrap();
    let mut sim = Simulator::with_disturbances(PlantConfig::default(), sc.failure, sc.gust).unwrap();
    sim.reset(sc.ifc).unwrap();
    sim
}

/// One measured channel: expected bias and SSD with their empirical values.
#[derive(Debug, Clone, Copy)]
pub struct NoiseStat {
    pub name: &'static str,
    pub bias: f64,
    pub ssd: f64,
    pub mean: f64,
    pub sd: f64,
    pub samples: usize,
}

impl NoiseStat {
    pub fn mean_ok(&self) -> bool {
        (self.mean - self.bias).abs() <= 3.0 * self.ssd / (self.samples as f64).sqrt()
    }

    pub fn sd_ok(&self) -> bool {
        (self.sd - self.ssd).abs() <= 0.01 * self.ssd
    }
}

/// Empirical statistics of `samples` noisy measurements of a zero signal.
pub fn noise_statistics(samples: usize, seed: u64) -> Vec<NoiseStat> {
    let spec = NoiseSpec::enabled();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth = Measurement::default();
    // Welford accumulators
    let mut mean = [0.0f64; 7];
    let mut m2 = [0.0f64; 7];
    for k in 1..=samples {
        let m = observe(&truth, &spec, &mut rng);
        for (i, v) in [m.p, m.q, m.r, m.theta, m.phi, m.beta, m.h].into_iter().enumerate() {
            let d = v - mean[i];
            mean[i] += d / k as f64;
            m2[i] += d * (v - mean[i]);
        }
    }
    let names = ["p", "q", "r", "theta", "phi", "beta", "h"];
    let table = [spec.rates, spec.rates, spec.rates, spec.attitude, spec.attitude, spec.sideslip, spec.altitude];
    (0..7)
        .map(|i| {
            let sd = (m2[i] / (samples as f64 - 1.0)).sqrt();
            NoiseStat { name: names[i], bias: table[i].bias, ssd: table[i].ssd, mean: mean[i], sd, samples }
        })
        .collect()
}

/// Numeric examples of the rewards and action mappings, each as
/// `(description, holds)`. Compared exactly unless noted.
pub fn reward_mapping_examples() -> Vec<(&'static str, bool)> {
    use sacflight::env::{altitude_reward, attitude_reward, pitch_ref_increment, ClipMode, IncrementMap};
    use std::f64::consts::PI;
    let abs = ClipMode::Absolute;
    let map = IncrementMap::from_limits(&PlantConfig::default().actuators.limits());
    let deg = |v: f64| v.to_degrees();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1e-300);
    vec![
        ("attitude reward of zero error is 0", attitude_reward([0.0; 3], abs) == 0.0),
        ("pi/6 pitch error gives -1/3", attitude_reward([0.0, PI / 6.0, 0.0], abs) == -1.0 / 3.0),
        ("saturated errors give -1", attitude_reward([10.0, -10.0, 10.0], abs) == -1.0),
        ("altitude reward of zero error is 0", altitude_reward(0.0, abs) == 0.0),
        ("120 m altitude error gives -0.5", altitude_reward(120.0, abs) == -0.5),
        ("1000 m altitude error gives -1", altitude_reward(1000.0, abs) == -1.0),
        ("elevator a=+1 gives +0.1490 deg", close(deg(map.apply([1.0, 0.0, 0.0])[0]), 0.1490)),
        ("elevator a=-1 gives -0.2005 deg", close(deg(map.apply([-1.0, 0.0, 0.0])[0]), -0.2005)),
        ("elevator a=0 gives -0.02575 deg", close(deg(map.apply([0.0; 3])[0]), -0.02575)),
        ("symmetric surfaces at a=0 give 0", map.apply([0.0; 3])[1] == 0.0 && map.apply([0.0; 3])[2] == 0.0),
        ("pitch reference a=0 gives 0", pitch_ref_increment(0.0) == 0.0),
        ("pitch reference a=+1 gives +0.1 deg", close(deg(pitch_ref_increment(1.0)), 0.1)),
        ("pitch reference a=-1 gives -0.1 deg", close(deg(pitch_ref_increment(-1.0)), -0.1)),
        ("pitch reference rate is 10 deg/s", close(deg(pitch_ref_increment(1.0)) * 100.0, 10.0)),
    ]
}

/// One 20 s cascaded episode at the nominal condition with untrained
/// stochastic agents. Returns the transitions stored per buffer and whether
/// every reward was in [−1, 0].
pub fn cascade_bookkeeping(seed: u64) -> (usize, usize, bool) {
    use sacflight::env::{AttitudeEnv, AttitudeRefs, CascadeEnv, EnvConfig};
    use sacflight::sac::{AgentConfig, ReplayBuffer, SacAgent};
    let env_cfg = EnvConfig::default();
    let mut env = CascadeEnv::new(AttitudeEnv::new(PlantConfig::default(), &env_cfg).unwrap(), &env_cfg).unwrap();
    let mut outer = SacAgent::new(AgentConfig::altitude(), seed).unwrap();
    let mut inner = SacAgent::new(AgentConfig::attitude(), seed + 1).unwrap();
    let mut outer_buf = ReplayBuffer::new(2, 1, 5000).unwrap();
    let mut inner_buf = ReplayBuffer::new(9, 3, 5000).unwrap();
    let h0 = env.reset(Ifc::default()).unwrap().h;
    let (h_ref, phi_ref) = (h0 + 20.0, 0.2);
    let mut in_range = true;
    let mut s_out = env.observe(h_ref);
    for _ in 0..2000 {
        let a_out = outer.policy_sample(&s_out, None).unwrap().action;
        let s_in = env.advance_pitch_ref(a_out[0], phi_ref);
        let a_in = inner.policy_sample(&s_in, None).unwrap().action;
        let out = env.apply_inner(&a_in, h_ref, phi_ref).unwrap();
        if out.aborted.is_some() {
            break;
        }
        in_range &= (-1.0..=0.0).contains(&out.altitude_reward) && (-1.0..=0.0).contains(&out.attitude_reward);
        let s_out2 = env.observe(h_ref);
        let s_in2 = env.inner().observe(AttitudeRefs::new(env.pitch_ref(), phi_ref));
        outer_buf.push_parts(&s_out, &a_out, out.altitude_reward, &s_out2).unwrap();
        inner_buf.push_parts(&s_in, &a_in, out.attitude_reward, &s_in2).unwrap();
        s_out = s_out2;
    }
    (outer_buf.len(), inner_buf.len(), in_range)
}
