//! End-to-end acceptance checks, one PASS/FAIL line per criterion.
//!
//! Usage: `cargo test --release --test acceptance [-- 1 5 8]` to run a subset.
//! Criterion 9 trains two full-scale stages (hours on one core) and only runs
//! with `SACFLIGHT_FULL_SCALE=1`, or evaluates an existing pair when
//! `SACFLIGHT_CASCADE_DIR` holds `attitude_final.ckpt` and `altitude_final.ckpt`.
//! Criterion 10 reuses that pair when available.

mod common;

use std::path::PathBuf;
use std::time::Instant;

use common::{checks, sac_oracle};
use sacflight::env::EnvConfig;
use sacflight::fault::{FailureKind, ScenarioSpec};
use sacflight::harness::{
    evaluate_attitude, evaluate_cascade, robustness_matrix, toy_benchmark, train_altitude, train_attitude,
    ReferenceProgram, TrainConfig, TrainHooks,
};
use sacflight::sac::{AgentConfig, FrozenPolicy, QNet, SacAgent};
use sacflight::sim::{Ifc, PlantConfig};

struct Verdict {
    pass: Option<bool>,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass: Some(pass), detail: detail.into() }
    }

    fn skip(detail: impl Into<String>) -> Self {
        Self { pass: None, detail: detail.into() }
    }
}

fn c1_gradients() -> Verdict {
    let t = Instant::now();
    let worst = common::gradient_suite(50, 2024, 1e-3);
    let secs = t.elapsed().as_secs_f64();
    Verdict::new(worst < 1e-4 && secs < 60.0, format!("max relative error {worst:.2e} over 50 nets in {secs:.2}s"))
}

fn c2_micro_oracle() -> Verdict {
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let f = sac_oracle::fixture(2, 1, 1, seed);
        let a = &f.agent;
        let critic = a.critic_loss(&f.batch, f.noise.view()).unwrap().loss;
        let policy = a.policy_objective(&f.batch, f.noise.view()).unwrap().objective;
        let temp = a.temperature_loss(&f.batch, f.noise.view()).unwrap().loss;
        let expect = [
            sac_oracle::critic_oracle(&f, a.q_params(QNet::Online1), a.q_params(QNet::Online2)),
            sac_oracle::policy_oracle(&f, a.policy_params()),
            sac_oracle::temperature_oracle(&f),
        ];
        for (got, want) in [critic, policy, temp].into_iter().zip(expect) {
            worst = worst.max((got - want).abs());
        }
    }
    Verdict::new(worst <= 1e-10, format!("max |loss - oracle| {worst:.2e} over 10 fixtures"))
}

fn c3_toy() -> Verdict {
    let mut lines = Vec::new();
    for seed in 0..5 {
        let t = Instant::now();
        let r = toy_benchmark(seed, 50_000).unwrap();
        lines.push(format!(
            "seed {seed}: eval {:.2} oracle {:.2} threshold {:.2} ({:.0}s)",
            r.eval_return,
            r.oracle_return,
            r.threshold,
            t.elapsed().as_secs_f64()
        ));
        if r.pass {
            return Verdict::new(true, lines.join("; "));
        }
    }
    Verdict::new(false, lines.join("; "))
}

fn c4_reward_mapping() -> Verdict {
    let failed: Vec<&str> = checks::reward_mapping_examples().into_iter().filter(|(_, ok)| !ok).map(|(n, _)| n).collect();
    let (outer, inner, in_range) = checks::cascade_bookkeeping(0);
    let book = outer == 2000 && inner == 2000 && in_range;
    Verdict::new(
        failed.is_empty() && book,
        format!("failed examples {failed:?}; cascade episode stored {outer}/{inner} transitions, rewards in range: {in_range}"),
    )
}

fn c5_simulator() -> Verdict {
    let lateral = checks::symmetric_flight_lateral_max(60.0);
    let drift = checks::trim_hold_drift(10.0);
    let orders = checks::rk4_orders();
    let tau = PlantConfig::default().actuators.time_constant;
    let rise = checks::actuator_rise_time(tau);
    let rise_err = (rise - tau).abs() / tau;
    let ok = lateral <= f64::EPSILON && drift < 1e-3 && orders.iter().all(|&o| o >= 3.5) && rise_err <= 0.02;
    Verdict::new(
        ok,
        format!("lateral max {lateral:.1e}; trim drift {drift:.2e}; RK4 orders {orders:.2?}; rise-time error {:.2}%", 100.0 * rise_err),
    )
}

fn c6_failures() -> Verdict {
    let kinds = [
        FailureKind::RudderJam,
        FailureKind::AileronEff,
        FailureKind::ElevatorRange,
        FailureKind::HtailLoss,
        FailureKind::Icing,
        FailureKind::CgShift,
    ];
    let mut identical = 0;
    for kind in kinds {
        let onset = sacflight::fault::FailureSpec::preset(kind).onset;
        if checks::failure_run(kind, onset + 1.0).0 {
            identical += 1;
        }
    }
    let (_, after) = checks::failure_run(FailureKind::RudderJam, 20.0);
    let jam = (-15.0f64).to_radians();
    let rudder_ok = !after.is_empty() && after.iter().all(|(_, u)| u.rudder == jam);
    let lim = 2.5f64.to_radians();
    let elev = checks::elevator_range_run(20.0);
    let elev_max = elev.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let elev_ok = !elev.is_empty() && elev_max <= lim;
    Verdict::new(
        identical == 6 && rudder_ok && elev_ok,
        format!(
            "{identical}/6 presets bit-identical before onset; rudder jammed at -15 deg: {rudder_ok}; max |elevator| {:.4} deg",
            elev_max.to_degrees()
        ),
    )
}

fn c7_noise() -> Verdict {
    let stats = checks::noise_statistics(1_000_000, 7);
    let bad: Vec<String> = stats
        .iter()
        .filter(|s| !(s.mean_ok() && s.sd_ok()))
        .map(|s| format!("{} mean {:.3e} sd {:.3e}", s.name, s.mean, s.sd))
        .collect();
    let worst_sd = stats.iter().map(|s| (s.sd - s.ssd).abs() / s.ssd).fold(0.0, f64::max);
    Verdict::new(bad.is_empty(), format!("7 channels, worst SSD deviation {:.3}%; out of tolerance: {bad:?}", 100.0 * worst_sd))
}

/// Mean per-channel nMAE of `policy` over `episodes` randomized step tasks.
fn attitude_score(policy: &FrozenPolicy, episodes: u64, seed: u64) -> Vec<(String, f64)> {
    let program = ReferenceProgram::attitude_steps().with_seed(seed);
    let plant = PlantConfig::default();
    let mut sums: Vec<(String, f64)> = Vec::new();
    for ep in 0..episodes {
        let r = evaluate_attitude(policy, &plant, &EnvConfig::default(), &program, Ifc::default(), ep, 20.0).unwrap();
        if r.aborted.is_some() {
            return vec![("aborted".into(), f64::INFINITY)];
        }
        for (i, c) in r.channels.iter().enumerate() {
            if sums.len() <= i {
                sums.push((c.name.clone(), 0.0));
            }
            sums[i].1 += c.nmae / episodes as f64;
        }
    }
    sums
}

fn c8_desk_attitude() -> Verdict {
    let mut train = TrainConfig::attitude();
    train.total_steps = 200_000;
    train.checkpoint_every = 0;
    let mut lines = Vec::new();
    for seed in 0..5 {
        let t = Instant::now();
        let out = train_attitude(&AgentConfig::attitude(), &PlantConfig::default(), &EnvConfig::default(), &train, seed, &mut TrainHooks::default()).unwrap();
        let policy = FrozenPolicy::from_agent(&out.agent);
        let score = attitude_score(&policy, 5, 1000 + seed);
        let worst = score.iter().map(|(_, v)| *v).fold(0.0, f64::max);
        let per: Vec<String> = score.iter().map(|(n, v)| format!("{n} {:.3}", v)).collect();
        lines.push(format!("seed {seed}: {} ({:.0}s)", per.join(" "), t.elapsed().as_secs_f64()));
        if out.diverged.is_none() && worst < 0.10 {
            return Verdict::new(true, lines.join("; "));
        }
    }
    Verdict::new(false, lines.join("; "))
}

fn cascade_dir() -> Option<PathBuf> {
    std::env::var_os("SACFLIGHT_CASCADE_DIR").map(PathBuf::from)
}

fn load_pair(dir: &std::path::Path) -> Option<(FrozenPolicy, FrozenPolicy)> {
    let inner = SacAgent::load(dir.join("attitude_final.ckpt")).ok()?;
    let outer = SacAgent::load(dir.join("altitude_final.ckpt")).ok()?;
    Some((FrozenPolicy::from_agent(&inner), FrozenPolicy::from_agent(&outer)))
}

fn score_pair(inner: &FrozenPolicy, outer: &FrozenPolicy) -> (bool, String) {
    let plant = PlantConfig::default();
    let env = EnvConfig::default();
    let nominal = evaluate_cascade(inner, outer, &plant, &env, &ScenarioSpec::default(), "nominal").unwrap();
    let mut stable = 0;
    let mut notes = Vec::new();
    for (name, sc) in ScenarioSpec::failure_presets() {
        let r = evaluate_cascade(inner, outer, &plant, &env, &sc, name).unwrap();
        if r.aborted.is_none() {
            stable += 1;
        }
        notes.push(format!("{name} {:.3}{}", r.nmae, if r.aborted.is_some() { " aborted" } else { "" }));
    }
    let ok = nominal.success && stable == 6;
    (ok, format!("nominal nMAE {:.4}; {stable}/6 failure cases stable [{}]", nominal.nmae, notes.join(", ")))
}

fn c9_full_cascade() -> Verdict {
    if let Some(dir) = cascade_dir() {
        return match load_pair(&dir) {
            Some((inner, outer)) => {
                let (ok, detail) = score_pair(&inner, &outer);
                Verdict::new(ok, format!("pair from {}: {detail}", dir.display()))
            }
            None => Verdict::new(false, format!("no checkpoint pair in {}", dir.display())),
        };
    }
    if std::env::var("SACFLIGHT_FULL_SCALE").map_or(true, |v| v != "1") {
        return Verdict::skip("long-running; set SACFLIGHT_FULL_SCALE=1 to train or SACFLIGHT_CASCADE_DIR to evaluate a pair");
    }
    let plant = PlantConfig::default();
    let env = EnvConfig::default();
    let out_dir = std::env::temp_dir().join("sacflight_acceptance");
    let mut lines = Vec::new();
    for seed in 0..5 {
        let dir = out_dir.join(format!("s{seed}"));
        let mut hooks = TrainHooks { checkpoint_dir: Some(dir.clone()), on_episode: None };
        let att = train_attitude(&AgentConfig::attitude(), &plant, &env, &TrainConfig::attitude(), seed, &mut hooks).unwrap();
        let inner = FrozenPolicy::from_agent(&att.agent);
        let alt = train_altitude(&inner, &AgentConfig::altitude(), &plant, &env, &TrainConfig::altitude(), seed, &mut hooks).unwrap();
        let outer = FrozenPolicy::from_agent(&alt.agent);
        let (ok, detail) = score_pair(&inner, &outer);
        lines.push(format!("seed {seed} ({}): {detail}", dir.display()));
        if ok {
            return Verdict::new(true, lines.join("; "));
        }
    }
    Verdict::new(false, lines.join("; "))
}

fn c10_matrix() -> Verdict {
    let (pair, source) = match cascade_dir().and_then(|d| load_pair(&d)) {
        Some(p) => (p, "trained pair"),
        None => (
            (
                FrozenPolicy::from_agent(&SacAgent::new(AgentConfig::attitude(), 0).unwrap()),
                FrozenPolicy::from_agent(&SacAgent::new(AgentConfig::altitude(), 0).unwrap()),
            ),
            "untrained pair",
        ),
    };
    let rows = robustness_matrix(&pair.0, &pair.1, &PlantConfig::default(), &EnvConfig::default());
    let complete = rows.len() == 8 && rows.iter().all(|r| r.report.nmae.is_finite() && !r.label.is_empty());
    let cells: Vec<String> = rows
        .iter()
        .map(|r| format!("{} {:.4}{}", r.label, r.report.nmae, if r.report.aborted.is_some() { " aborted" } else { "" }))
        .collect();
    Verdict::new(complete, format!("{} rows with {source}: {}", rows.len(), cells.join(", ")))
}

fn main() {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(usize, &str, fn() -> Verdict); 10] = [
        (1, "gradient suite", c1_gradients),
        (2, "SAC micro-oracle", c2_micro_oracle),
        (3, "toy benchmark", c3_toy),
        (4, "reward and mapping arithmetic", c4_reward_mapping),
        (5, "simulator properties", c5_simulator),
        (6, "failure semantics", c6_failures),
        (7, "noise statistics", c7_noise),
        (8, "desk-scale attitude training", c8_desk_attitude),
        (9, "full-scale cascade training", c9_full_cascade),
        (10, "robustness matrix shape", c10_matrix),
    ];
    let mut failures = 0;
    for (n, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let v = run();
        let status = match v.pass {
            Some(true) => "PASS",
            Some(false) => {
                failures += 1;
                "FAIL"
            }
            None => "SKIP",
        };
        println!("criterion {n:>2} {status} {name} [{:.1}s]: {}", t.elapsed().as_secs_f64(), v.detail);
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
