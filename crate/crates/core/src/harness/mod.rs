//! Reference programs, training curricula, evaluation and sweeps.

mod eval;
mod metrics;
mod reference;
mod toy;
mod train;

pub use eval::{
    evaluate_attitude, evaluate_cascade, reliability_sweep, robustness_conditions, robustness_matrix,
    train_and_score, MatrixRow, SweepConfig, SweepRun, SweepSummary,
};
pub use metrics::{
    attitude_channels, cascade_channels, smooth, wilson_interval, ChannelMetric, EvalReport, SIDESLIP_RANGE_DEG,
    SUCCESS_THRESHOLD,
};
pub use reference::{interpolate, ReferenceProgram, ReferenceSignal};
pub use toy::{toy_agent_config, toy_benchmark, toy_eval_return, toy_oracle, ToyEnv, ToyResult};
pub use train::{train_altitude, train_attitude, EpisodeRecord, Stage, TrainConfig, TrainHooks, TrainOutcome};
