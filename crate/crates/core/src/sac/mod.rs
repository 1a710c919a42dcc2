//! Soft Actor-Critic: tanh-squashed Gaussian policy, double Q-functions with
//! soft-updated targets, replay memory, and automatic entropy temperature.

mod agent;
mod config;
pub mod policy;
mod replay;

pub use agent::{
    CriticLoss, Diagnostics, FrozenPolicy, PolicyObjective, PolicySample, QNet, SacAgent, TemperatureLoss,
    TrainStatus, CHECKPOINT_KIND,
};
pub use config::{AgentConfig, LrSchedule};
pub use replay::{Minibatch, ReplayBuffer, Transition};
