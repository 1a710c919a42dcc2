//! Tanh-squashed diagonal Gaussian.
//!
//! With pre-squash sample `u = μ + σ ⊙ ξ` and action `a = tanh(u)`:
//!
//! `log π(a|s) = Σᵢ [log N(uᵢ; μᵢ, σᵢ) − log(1 − tanh²(uᵢ))]`
//!
//! and `log(1 − tanh²(u)) = 2(log 2 − u − softplus(−2u))`, which stays finite
//! for any finite `u`.

use std::f64::consts::{LN_2, PI};

/// Bounds applied to the policy's log standard deviation before exponentiation.
pub const LOG_STD_MIN: f64 = -20.0;
pub const LOG_STD_MAX: f64 = 2.0;

pub fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else if x < -30.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

/// `log(1 − tanh²(u))` in a form that does not underflow for large `|u|`.
pub fn log_one_minus_tanh_sq(u: f64) -> f64 {
    2.0 * (LN_2 - u - softplus(-2.0 * u))
}

/// Standard normal log-density of `ξ` plus the `−log σ` Jacobian, i.e.
/// `log N(μ + σξ; μ, σ)`.
pub fn gaussian_log_density(xi: f64, log_std: f64) -> f64 {
    -0.5 * xi * xi - log_std - 0.5 * (2.0 * PI).ln()
}

/// Log-density of one squashed component given its pre-squash noise.
pub fn squashed_component_log_prob(xi: f64, log_std: f64, u: f64) -> f64 {
    gaussian_log_density(xi, log_std) - log_one_minus_tanh_sq(u)
}

/// Log-density of action `a ∈ (−1, 1)` under the squashed Gaussian `(μ, σ)`.
pub fn squashed_log_prob_of_action(mean: f64, log_std: f64, action: f64) -> f64 {
    let u = action.atanh();
    let xi = (u - mean) / log_std.exp();
    squashed_component_log_prob(xi, log_std, u)
}

/// Clamps a raw network log-σ; the flag is false where the clamp is active
/// (zero gradient there).
pub fn clamp_log_std(raw: f64, min: f64, max: f64) -> (f64, bool) {
    if raw < min {
        (min, false)
    } else if raw > max {
        (max, false)
    } else {
        (raw, true)
    }
}

/// One sampled component: pre-squash value, action, and log-density term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentSample {
    pub pre_squash: f64,
    pub action: f64,
    pub log_prob: f64,
}

pub fn sample_component(mean: f64, log_std: f64, xi: f64) -> ComponentSample {
    let u = mean + log_std.exp() * xi;
    ComponentSample {
        pre_squash: u,
        action: u.tanh(),
        log_prob: squashed_component_log_prob(xi, log_std, u),
    }
}
