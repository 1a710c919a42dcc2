use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sac::policy::{LOG_STD_MAX, LOG_STD_MIN};

/// Step-size schedule indexed by the agent's environment-step counter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LrSchedule {
    Constant { value: f64 },
    /// Linear interpolation from `start` at step 0 to `end` at `total_steps`,
    /// held at `end` afterwards.
    Linear { start: f64, end: f64, total_steps: u64 },
}

impl LrSchedule {
    pub fn at(&self, step: u64) -> f64 {
        match *self {
            LrSchedule::Constant { value } => value,
            LrSchedule::Linear { start, end, total_steps } => {
                if total_steps == 0 {
                    return end;
                }
                let frac = (step as f64 / total_steps as f64).min(1.0);
                start + (end - start) * frac
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            LrSchedule::Constant { value } => value.is_finite() && value >= 0.0,
            LrSchedule::Linear { start, end, .. } => {
                start.is_finite() && end.is_finite() && start >= 0.0 && end >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config("learning_rate: rates must be finite and non-negative"))
        }
    }
}

/// SAC hyperparameters. Defaults follow the altitude/attitude controller table:
/// γ = 0.99, τ = 0.995 (weight on the old target), |ℬ| = 256, |𝒟| = 5·10⁴,
/// entropy target −m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    /// Environment-state width n.
    pub state_dim: usize,
    /// Action width m.
    pub action_dim: usize,
    /// Units per hidden layer (two hidden layers).
    pub hidden_units: usize,
    pub discount: f64,
    /// Weight on the previous target in `k̄ ← (1−τ)k + τk̄`.
    pub smoothing: f64,
    pub learning_rate: LrSchedule,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    /// Target entropy H̄, conventionally −m.
    pub entropy_target: f64,
    pub initial_log_temperature: f64,
    pub log_std_min: f64,
    pub log_std_max: f64,
}

impl AgentConfig {
    /// Outer-loop (altitude) controller: n = 2, m = 1, 32×32, λ = 3·10⁻⁴.
    pub fn altitude() -> Self {
        Self {
            state_dim: 2,
            action_dim: 1,
            hidden_units: 32,
            discount: 0.99,
            smoothing: 0.995,
            learning_rate: LrSchedule::Constant { value: 3e-4 },
            batch_size: 256,
            buffer_capacity: 50_000,
            entropy_target: -1.0,
            initial_log_temperature: 0.0,
            log_std_min: LOG_STD_MIN,
            log_std_max: LOG_STD_MAX,
        }
    }

    /// Inner-loop (attitude) controller: n = 9, m = 3, 64×64, λ linear
    /// 4·10⁻⁴ → 0 over 10⁶ steps.
    pub fn attitude() -> Self {
        Self {
            state_dim: 9,
            action_dim: 3,
            hidden_units: 64,
            entropy_target: -3.0,
            learning_rate: LrSchedule::Linear { start: 4e-4, end: 0.0, total_steps: 1_000_000 },
            ..Self::altitude()
        }
    }

    pub fn entropy_target(&self) -> f64 {
        self.entropy_target
    }

    pub fn validate(&self) -> Result<()> {
        if self.state_dim == 0 || self.action_dim == 0 || self.hidden_units == 0 {
            return Err(Error::config("state_dim, action_dim and hidden_units must be positive"));
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(Error::config(format!("discount must lie in (0, 1), got {}", self.discount)));
        }
        if !(self.smoothing >= 0.0 && self.smoothing <= 1.0) {
            return Err(Error::config(format!("smoothing must lie in [0, 1], got {}", self.smoothing)));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch_size must be at least 1"));
        }
        if self.buffer_capacity < self.batch_size {
            return Err(Error::config("buffer_capacity must be at least batch_size"));
        }
        if self.log_std_min >= self.log_std_max {
            return Err(Error::config("log_std_min must be below log_std_max"));
        }
        if !self.entropy_target.is_finite() {
            return Err(Error::config("entropy_target must be finite"));
        }
        if !self.initial_log_temperature.is_finite() {
            return Err(Error::config("initial_log_temperature must be finite"));
        }
        self.learning_rate.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_hyperparameter_table() {
        let alt = AgentConfig::altitude();
        assert_eq!((alt.state_dim, alt.action_dim, alt.hidden_units), (2, 1, 32));
        assert_eq!(alt.entropy_target(), -1.0);
        assert_eq!(alt.learning_rate.at(123_456), 3e-4);
        let att = AgentConfig::attitude();
        assert_eq!((att.state_dim, att.action_dim, att.hidden_units), (9, 3, 64));
        assert_eq!(att.entropy_target(), -3.0);
        for c in [&alt, &att] {
            assert_eq!(c.discount, 0.99);
            assert_eq!(c.smoothing, 0.995);
            assert_eq!(c.batch_size, 256);
            assert_eq!(c.buffer_capacity, 50_000);
            c.validate().unwrap();
        }
    }

    #[test]
    fn linear_schedule_decays_to_zero() {
        let s = AgentConfig::attitude().learning_rate;
        assert_eq!(s.at(0), 4e-4);
        assert!((s.at(500_000) - 2e-4).abs() < 1e-18);
        assert_eq!(s.at(1_000_000), 0.0);
        assert_eq!(s.at(2_000_000), 0.0);
    }

    #[test]
    fn invalid_discount_names_field() {
        let c = AgentConfig { discount: 1.2, ..AgentConfig::altitude() };
        assert!(c.validate().unwrap_err().to_string().contains("discount"));
    }
}
