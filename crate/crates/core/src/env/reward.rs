//! Rewards, error weights and incremental action maps.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::sim::SurfaceLimits;

/// Per-radian weights on `[β, θ, φ]` errors.
pub const ATTITUDE_COST: [f64; 3] = [4.0 * 6.0 / PI, 6.0 / PI, 6.0 / PI];
/// Per-metre weight on the altitude error.
pub const ALTITUDE_COST: f64 = 1.0 / 240.0;
/// Largest pitch-reference increment per step, rad (10 °/s at 100 Hz).
pub const PITCH_REF_RATE_PER_STEP: f64 = 0.1 * PI / 180.0;

/// How weighted errors are clipped before the L1 norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClipMode {
    /// `clip(|c·e|, 0, 1)`.
    #[default]
    Absolute,
    /// `clip(c·e, −1, 0)` on the signed value; positive errors cost nothing.
    Signed,
}

impl ClipMode {
    fn term(self, weighted: f64) -> f64 {
        match self {
            ClipMode::Absolute => weighted.abs().clamp(0.0, 1.0),
            ClipMode::Signed => -weighted.clamp(-1.0, 0.0),
        }
    }
}

/// Weighted errors `c ⊙ e` for `e = [β err, θ err, φ err]`.
pub fn weighted_attitude_error(e: [f64; 3]) -> [f64; 3] {
    [ATTITUDE_COST[0] * e[0], ATTITUDE_COST[1] * e[1], ATTITUDE_COST[2] * e[2]]
}

pub fn attitude_reward(e: [f64; 3], mode: ClipMode) -> f64 {
    -weighted_attitude_error(e).iter().map(|&w| mode.term(w)).sum::<f64>() / 3.0
}

pub fn altitude_reward(dh: f64, mode: ClipMode) -> f64 {
    -mode.term(ALTITUDE_COST * dh)
}

/// Affine map from `a ∈ [−1, 1]³` to surface increments bounded by a
/// hundredth of the actuator limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementMap {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl IncrementMap {
    pub fn from_limits(limits: &SurfaceLimits) -> Self {
        Self { min: limits.min.map(|v| v / 100.0), max: limits.max.map(|v| v / 100.0) }
    }

    pub fn apply(&self, a: [f64; 3]) -> [f64; 3] {
        std::array::from_fn(|i| {
            let a = a[i].clamp(-1.0, 1.0);
            self.min[i] + (a + 1.0) * (self.max[i] - self.min[i]) / 2.0
        })
    }
}

/// Pitch-reference increment for `a ∈ [−1, 1]`.
pub fn pitch_ref_increment(a: f64) -> f64 {
    a.clamp(-1.0, 1.0) * PITCH_REF_RATE_PER_STEP
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_mode_ignores_positive_errors() {
        assert_eq!(attitude_reward([0.0, 0.1, 0.0], ClipMode::Signed), 0.0);
        assert!(attitude_reward([0.0, -0.1, 0.0], ClipMode::Signed) < 0.0);
        assert_eq!(altitude_reward(-1000.0, ClipMode::Signed), -1.0);
    }
}
