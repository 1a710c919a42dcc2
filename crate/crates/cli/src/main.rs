//! `sacflight` command-line entry point.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use sacflight::config::ExperimentConfig;
use sacflight::fault::ScenarioSpec;
use sacflight::harness::{
    evaluate_cascade, reliability_sweep, robustness_matrix, toy_benchmark, train_altitude, train_attitude, EpisodeRecord,
    EvalReport, Stage, TrainHooks,
};
use sacflight::nn::Checkpoint;
use sacflight::sac::{FrozenPolicy, SacAgent};
use sacflight::sim::write_csv_file;
use sacflight::Error;

#[derive(Parser, Debug)]
#[command(name = "sacflight", version, about = "Soft Actor-Critic flight-control experiments")]
struct Cli {
    /// TOML experiment configuration layered over the defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `output_dir`.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Run directory; defaults to `<output_dir>/<command>_s<seed>`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train one stage of the curriculum.
    Train {
        #[arg(long, value_parser = ["attitude", "altitude"])]
        stage: String,
        /// Overrides the stage's `total_steps`.
        #[arg(long)]
        steps: Option<u64>,
        /// Frozen inner-loop policy; required for the altitude stage.
        #[arg(long)]
        attitude_checkpoint: Option<PathBuf>,
    },
    /// Evaluate a cascaded pair on a scenario preset.
    Eval {
        /// nominal, rudder_jam, aileron_eff, elevator_range, htail_loss,
        /// icing, cg_shift or noise_gust; defaults to the configured scenario.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        attitude_checkpoint: PathBuf,
        #[arg(long)]
        altitude_checkpoint: PathBuf,
    },
    /// Evaluate a cascaded pair on the eight robustness conditions.
    Matrix {
        #[arg(long)]
        attitude_checkpoint: PathBuf,
        #[arg(long)]
        altitude_checkpoint: PathBuf,
    },
    /// Train and score independent pairs; report the success rate.
    Sweep {
        #[arg(long)]
        n: Option<usize>,
        /// Overrides `total_steps` of both sweep stages.
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Double-integrator benchmark of the learner.
    Toy {
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Print the contents of a checkpoint file.
    InspectCheckpoint { path: PathBuf },
}

/// Exit codes, one per failure class.
mod exit {
    pub const FAILURE: u8 = 1;
    pub const CONFIG_READ: u8 = 3;
    pub const CONFIG_INVALID: u8 = 4;
    pub const UNKNOWN_SCENARIO: u8 = 5;
    pub const CHECKPOINT_VERSION: u8 = 6;
    pub const CHECKPOINT_MALFORMED: u8 = 7;
    pub const PRECONDITION: u8 = 8;
    pub const IO: u8 = 9;
    pub const DIVERGED: u8 = 10;
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ConfigRead { .. } => exit::CONFIG_READ,
        Error::ConfigParse { .. } | Error::Config(_) => exit::CONFIG_INVALID,
        Error::UnknownScenario(_) => exit::UNKNOWN_SCENARIO,
        Error::CheckpointVersion { .. } => exit::CHECKPOINT_VERSION,
        Error::Checkpoint(_) | Error::Shape(_) => exit::CHECKPOINT_MALFORMED,
        Error::Precondition(_) => exit::PRECONDITION,
        Error::Io(_) | Error::Csv(_) => exit::IO,
        Error::Numeric(_) => exit::DIVERGED,
        _ => exit::FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.clone();
    }
    Ok(cfg)
}

fn run_dir(cli: &Cli, cfg: &ExperimentConfig, name: &str) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| cfg.output_dir.join(format!("{name}_s{}", cfg.seed)))
}

fn load_policy(path: &Path, what: &str) -> Result<FrozenPolicy, Error> {
    if !path.exists() {
        return Err(Error::Precondition(format!("{what} checkpoint {} does not exist", path.display())));
    }
    Ok(FrozenPolicy::from_agent(&SacAgent::load(path)?))
}

fn write_toml<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    let text = toml::to_string_pretty(value).map_err(|e| Error::Config(format!("cannot serialize {}: {e}", path.display())))?;
    std::fs::write(path, text)?;
    Ok(())
}

#[derive(Serialize)]
struct TrainSummary<'a> {
    stage: &'a str,
    seed: u64,
    steps: u64,
    episodes: usize,
    final_smoothed_return: f64,
    diverged: Option<String>,
}

#[derive(Serialize)]
struct EvalSummary<'a> {
    scenario: &'a str,
    nmae: f64,
    success: bool,
    completed_s: f64,
    aborted: Option<String>,
}

#[derive(Serialize)]
struct MatrixCsvRow<'a> {
    label: &'a str,
    initial_altitude_m: f64,
    initial_speed_mps: f64,
    nmae: f64,
    h_nmae: f64,
    phi_nmae: f64,
    beta_nmae: f64,
    success: bool,
    aborted: String,
}

#[derive(Serialize)]
struct SweepCsvRow {
    seed: u64,
    nmae: f64,
    success: bool,
    failure: String,
}

#[derive(Serialize)]
struct SweepSummaryRow {
    runs: usize,
    successes: usize,
    success_rate: f64,
    ci_low: f64,
    ci_high: f64,
}

#[derive(Serialize)]
struct ToyCsvRow {
    seed: u64,
    eval_return: f64,
    oracle_return: f64,
    threshold: f64,
    pass: bool,
}

#[derive(Serialize)]
struct ToyCurveRow {
    seed: u64,
    episode: usize,
    reward_sum: f64,
}

fn channel_nmae(r: &EvalReport, name: &str) -> f64 {
    r.channel(name).map_or(f64::NAN, |c| c.nmae)
}

fn write_eval(dir: &Path, r: &EvalReport) -> Result<(), Error> {
    write_csv_file(dir.join("trajectory.csv"), &r.trajectory)?;
    write_csv_file(dir.join("metrics.csv"), &r.channels)?;
    write_toml(
        &dir.join("summary.toml"),
        &EvalSummary { scenario: &r.scenario, nmae: r.nmae, success: r.success, completed_s: r.completed, aborted: r.aborted.clone() },
    )
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Command::InspectCheckpoint { path } = &cli.command {
        return inspect(path);
    }
    let mut cfg = load_config(&cli)?;
    match &cli.command {
        Command::Train { stage, steps, attitude_checkpoint } => {
            let stage: Stage = stage.parse()?;
            let train = match stage {
                Stage::Attitude => &mut cfg.attitude_train,
                Stage::Altitude => &mut cfg.altitude_train,
            };
            if let Some(n) = steps {
                train.total_steps = *n;
            }
            cfg.validate()?;
            let inner = match (stage, attitude_checkpoint) {
                (Stage::Altitude, None) => {
                    return Err(Error::Precondition(
                        "the altitude stage needs a trained attitude policy (--attitude-checkpoint)".into(),
                    ))
                }
                (Stage::Altitude, Some(p)) => Some(load_policy(p, "attitude")?),
                (Stage::Attitude, _) => None,
            };
            let dir = run_dir(&cli, &cfg, &format!("train_{}", stage.name()));
            cfg.write_snapshot(&dir)?;
            let mut beat = |r: &EpisodeRecord| {
                if r.episode % 10 == 0 {
                    eprintln!("[{}] episode {} steps {} return {:.1} smoothed {:.1}", stage.name(), r.episode, r.steps, r.reward_sum, r.smoothed);
                }
            };
            let mut hooks = TrainHooks { checkpoint_dir: Some(dir.join("checkpoints")), on_episode: Some(&mut beat) };
            let outcome = match &inner {
                None => train_attitude(&cfg.attitude_agent, &cfg.plant, &cfg.env, &cfg.attitude_train, cfg.seed, &mut hooks)?,
                Some(p) => train_altitude(p, &cfg.altitude_agent, &cfg.plant, &cfg.env, &cfg.altitude_train, cfg.seed, &mut hooks)?,
            };
            write_csv_file(dir.join("learning_curve.csv"), &outcome.curve)?;
            write_toml(
                &dir.join("summary.toml"),
                &TrainSummary {
                    stage: stage.name(),
                    seed: cfg.seed,
                    steps: outcome.steps,
                    episodes: outcome.curve.len(),
                    final_smoothed_return: outcome.curve.last().map_or(0.0, |r| r.smoothed),
                    diverged: outcome.diverged.clone(),
                },
            )?;
            println!("{}", dir.join("checkpoints").join(format!("{}_final.ckpt", stage.name())).display());
            match outcome.diverged {
                Some(msg) => Err(Error::Numeric(format!("training diverged: {msg}"))),
                None => Ok(()),
            }
        }
        Command::Eval { scenario, attitude_checkpoint, altitude_checkpoint } => {
            if let Some(name) = scenario {
                cfg.scenario = ScenarioSpec::preset(name)?;
            }
            cfg.validate()?;
            let label = scenario.clone().unwrap_or_else(|| "configured".into());
            let inner = load_policy(attitude_checkpoint, "attitude")?;
            let outer = load_policy(altitude_checkpoint, "altitude")?;
            let dir = run_dir(&cli, &cfg, &format!("eval_{label}"));
            cfg.write_snapshot(&dir)?;
            let report = evaluate_cascade(&inner, &outer, &cfg.plant, &cfg.env, &cfg.scenario, &label)?;
            write_eval(&dir, &report)?;
            println!("{label}: nMAE {:.2}% success {} aborted {:?}", 100.0 * report.nmae, report.success, report.aborted);
            Ok(())
        }
        Command::Matrix { attitude_checkpoint, altitude_checkpoint } => {
            cfg.validate()?;
            let inner = load_policy(attitude_checkpoint, "attitude")?;
            let outer = load_policy(altitude_checkpoint, "altitude")?;
            let dir = run_dir(&cli, &cfg, "matrix");
            cfg.write_snapshot(&dir)?;
            let rows = robustness_matrix(&inner, &outer, &cfg.plant, &cfg.env);
            let csv: Vec<_> = rows
                .iter()
                .map(|r| MatrixCsvRow {
                    label: &r.label,
                    initial_altitude_m: r.altitude,
                    initial_speed_mps: r.speed,
                    nmae: r.report.nmae,
                    h_nmae: channel_nmae(&r.report, "h"),
                    phi_nmae: channel_nmae(&r.report, "phi"),
                    beta_nmae: channel_nmae(&r.report, "beta"),
                    success: r.report.success,
                    aborted: r.report.aborted.clone().unwrap_or_default(),
                })
                .collect();
            write_csv_file(dir.join("matrix.csv"), &csv)?;
            for r in &rows {
                println!("{:32} {:6.2}%", r.label, 100.0 * r.report.nmae);
            }
            Ok(())
        }
        Command::Sweep { n, steps } => {
            if let Some(n) = n {
                cfg.sweep.runs = *n;
            }
            if let Some(s) = steps {
                cfg.sweep.attitude.total_steps = *s;
                cfg.sweep.altitude.total_steps = *s;
            }
            cfg.sweep.base_seed = cfg.seed;
            cfg.validate()?;
            let dir = run_dir(&cli, &cfg, "sweep");
            cfg.write_snapshot(&dir)?;
            let summary = reliability_sweep((&cfg.attitude_agent, &cfg.altitude_agent), &cfg.plant, &cfg.env, &cfg.sweep)?;
            let rows: Vec<_> = summary
                .runs
                .iter()
                .map(|r| SweepCsvRow { seed: r.seed, nmae: r.nmae, success: r.success, failure: r.failure.clone().unwrap_or_default() })
                .collect();
            write_csv_file(dir.join("sweep.csv"), &rows)?;
            let successes = summary.runs.iter().filter(|r| r.success).count();
            write_csv_file(
                dir.join("sweep_summary.csv"),
                &[SweepSummaryRow {
                    runs: summary.runs.len(),
                    successes,
                    success_rate: summary.success_rate,
                    ci_low: summary.ci_low,
                    ci_high: summary.ci_high,
                }],
            )?;
            println!(
                "success rate {:.1}% ({successes}/{}), 95% CI [{:.1}%, {:.1}%]",
                100.0 * summary.success_rate,
                summary.runs.len(),
                100.0 * summary.ci_low,
                100.0 * summary.ci_high
            );
            Ok(())
        }
        Command::Toy { seeds, steps } => {
            if let Some(s) = seeds {
                cfg.toy.seeds = *s;
            }
            if let Some(s) = steps {
                cfg.toy.steps = *s;
            }
            cfg.validate()?;
            let dir = run_dir(&cli, &cfg, "toy");
            cfg.write_snapshot(&dir)?;
            let mut rows = Vec::new();
            let mut curve = Vec::new();
            for i in 0..cfg.toy.seeds as u64 {
                let seed = cfg.seed + i;
                let r = toy_benchmark(seed, cfg.toy.steps)?;
                eprintln!("[toy] seed {seed}: return {:.2} threshold {:.2} pass {}", r.eval_return, r.threshold, r.pass);
                curve.extend(r.episode_returns.iter().enumerate().map(|(episode, &reward_sum)| ToyCurveRow { seed, episode, reward_sum }));
                rows.push(ToyCsvRow { seed, eval_return: r.eval_return, oracle_return: r.oracle_return, threshold: r.threshold, pass: r.pass });
            }
            write_csv_file(dir.join("toy.csv"), &rows)?;
            write_csv_file(dir.join("toy_curve.csv"), &curve)?;
            let passed = rows.iter().filter(|r| r.pass).count();
            println!("{passed}/{} seeds reached the oracle threshold", rows.len());
            Ok(())
        }
        Command::InspectCheckpoint { .. } => unreachable!(),
    }
}

fn inspect(path: &Path) -> Result<(), Error> {
    let ckpt = Checkpoint::load(path)?;
    println!("kind: {}", ckpt.kind);
    for e in &ckpt.entries {
        println!("  {:32} {:4} {:?}", e.name, e.dtype_name(), e.dims);
    }
    if ckpt.kind == sacflight::sac::CHECKPOINT_KIND {
        let agent = SacAgent::from_checkpoint(&ckpt)?;
        println!("steps: {}", agent.steps());
        println!("eta: {}", agent.eta());
        let cfg = toml::to_string_pretty(agent.config()).map_err(|e| Error::Config(e.to_string()))?;
        println!("[config]\n{cfg}");
    }
    Ok(())
}
