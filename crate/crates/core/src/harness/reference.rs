//! Reference-signal programs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A reference-signal recipe. Angles in degrees, altitudes in metres relative
/// to the initial altitude, times in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceProgram {
    /// Independent random step sequences for θ^R and φ^R, redrawn per episode.
    AttitudeSteps {
        theta_min_deg: f64,
        theta_max_deg: f64,
        phi_min_deg: f64,
        phi_max_deg: f64,
        min_hold: f64,
        max_hold: f64,
        /// Minimum change between successive levels.
        min_separation_deg: f64,
        seed: u64,
    },
    /// Piecewise-linear h^R and φ^R keyframes `[t, value]`.
    AltitudeProfile { h_keyframes: Vec<[f64; 2]>, phi_keyframes: Vec<[f64; 2]> },
    /// Random climb, hold and descent segments with banked turns, redrawn per
    /// episode. Used for altitude-stage training.
    AltitudeRandom {
        /// Largest |Δh| of one climb or descent segment, m.
        max_step_h: f64,
        /// Vertical speed range for ramps, m/s.
        min_climb_rate: f64,
        max_climb_rate: f64,
        phi_max_deg: f64,
        /// Roll-in and roll-out rate, deg/s.
        roll_rate_deg: f64,
        min_hold: f64,
        max_hold: f64,
        seed: u64,
    },
    Sinusoidal { period_h: f64, amplitude_h: f64, period_phi: f64, amplitude_phi_deg: f64 },
    Triangular { period_h: f64, amplitude_h: f64, period_phi: f64, amplitude_phi_deg: f64 },
}

impl ReferenceProgram {
    pub const ATTITUDE_EPISODE_DURATION: f64 = 20.0;
    pub const ALTITUDE_PROFILE_DURATION: f64 = 90.0;

    pub fn attitude_steps() -> Self {
        ReferenceProgram::AttitudeSteps {
            theta_min_deg: -15.0,
            theta_max_deg: 25.0,
            phi_min_deg: -70.0,
            phi_max_deg: 70.0,
            min_hold: 2.5,
            max_hold: 10.0,
            min_separation_deg: 5.0,
            seed: 0,
        }
    }

    /// Climb, hold, climb with a 40° bank turn during each climb.
    pub fn altitude_profile() -> Self {
        ReferenceProgram::AltitudeProfile {
            h_keyframes: vec![[0.0, 0.0], [10.0, 0.0], [40.0, 120.0], [50.0, 120.0], [80.0, 240.0], [90.0, 240.0]],
            phi_keyframes: vec![
                [0.0, 0.0],
                [20.0, 0.0],
                [25.0, 40.0],
                [45.0, 40.0],
                [50.0, 0.0],
                [55.0, 0.0],
                [60.0, -40.0],
                [75.0, -40.0],
                [80.0, 0.0],
                [90.0, 0.0],
            ],
        }
    }

    pub fn altitude_random() -> Self {
        ReferenceProgram::AltitudeRandom {
            max_step_h: 150.0,
            min_climb_rate: 2.0,
            max_climb_rate: 6.0,
            phi_max_deg: 45.0,
            roll_rate_deg: 8.0,
            min_hold: 5.0,
            max_hold: 20.0,
            seed: 0,
        }
    }

    pub fn sinusoidal_low() -> Self {
        ReferenceProgram::Sinusoidal { period_h: 80.0, amplitude_h: 80.0, period_phi: 50.0, amplitude_phi_deg: 50.0 }
    }

    pub fn sinusoidal_high() -> Self {
        ReferenceProgram::Sinusoidal { period_h: 40.0, amplitude_h: 40.0, period_phi: 25.0, amplitude_phi_deg: 25.0 }
    }

    pub fn triangular_low() -> Self {
        ReferenceProgram::Triangular { period_h: 80.0, amplitude_h: 80.0, period_phi: 50.0, amplitude_phi_deg: 50.0 }
    }

    pub fn triangular_high() -> Self {
        ReferenceProgram::Triangular { period_h: 40.0, amplitude_h: 40.0, period_phi: 25.0, amplitude_phi_deg: 25.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ReferenceProgram::AttitudeSteps { .. } => "attitude_steps",
            ReferenceProgram::AltitudeProfile { .. } => "altitude_profile",
            ReferenceProgram::AltitudeRandom { .. } => "altitude_random",
            ReferenceProgram::Sinusoidal { .. } => "sinusoidal",
            ReferenceProgram::Triangular { .. } => "triangular",
        }
    }

    /// Same program with its random stream reseeded; deterministic programs
    /// are returned unchanged.
    pub fn with_seed(&self, new_seed: u64) -> Self {
        let mut p = self.clone();
        match &mut p {
            ReferenceProgram::AttitudeSteps { seed, .. } | ReferenceProgram::AltitudeRandom { seed, .. } => *seed = new_seed,
            _ => {}
        }
        p
    }

    /// True for programs that define h^R (outer-loop tasks).
    pub fn tracks_altitude(&self) -> bool {
        !matches!(self, ReferenceProgram::AttitudeSteps { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ReferenceProgram::AttitudeSteps {
                theta_min_deg,
                theta_max_deg,
                phi_min_deg,
                phi_max_deg,
                min_hold,
                max_hold,
                min_separation_deg,
                ..
            } => {
                if !(theta_min_deg < theta_max_deg && phi_min_deg < phi_max_deg) {
                    return Err(Error::config("attitude_steps: level ranges must be non-empty"));
                }
                if !(*min_hold > 0.0 && min_hold <= max_hold) {
                    return Err(Error::config("attitude_steps: need 0 < min_hold <= max_hold"));
                }
                let span = (theta_max_deg - theta_min_deg).min(phi_max_deg - phi_min_deg);
                if !(*min_separation_deg >= 0.0 && *min_separation_deg < span / 2.0) {
                    return Err(Error::config("attitude_steps: min_separation_deg too large for the level ranges"));
                }
            }
            ReferenceProgram::AltitudeProfile { h_keyframes, phi_keyframes } => {
                for (name, k) in [("h_keyframes", h_keyframes), ("phi_keyframes", phi_keyframes)] {
                    if k.is_empty() || k.windows(2).any(|w| w[1][0] < w[0][0]) || k.iter().flatten().any(|v| !v.is_finite()) {
                        return Err(Error::config(format!("altitude_profile.{name} must be non-empty, finite and time-ordered")));
                    }
                }
            }
            ReferenceProgram::AltitudeRandom {
                max_step_h,
                min_climb_rate,
                max_climb_rate,
                phi_max_deg,
                roll_rate_deg,
                min_hold,
                max_hold,
                ..
            } => {
                if !(*max_step_h > 0.0 && *phi_max_deg >= 0.0 && *roll_rate_deg > 0.0) {
                    return Err(Error::config("altitude_random: max_step_h and roll_rate_deg must be positive"));
                }
                if !(*min_climb_rate > 0.0 && min_climb_rate <= max_climb_rate) {
                    return Err(Error::config("altitude_random: need 0 < min_climb_rate <= max_climb_rate"));
                }
                if !(*min_hold > 0.0 && min_hold <= max_hold) {
                    return Err(Error::config("altitude_random: need 0 < min_hold <= max_hold"));
                }
            }
            ReferenceProgram::Sinusoidal { period_h, amplitude_h, period_phi, amplitude_phi_deg }
            | ReferenceProgram::Triangular { period_h, amplitude_h, period_phi, amplitude_phi_deg } => {
                if !(*period_h > 0.0 && *period_phi > 0.0) {
                    return Err(Error::config("periodic program: periods must be positive"));
                }
                if !(*amplitude_h >= 0.0 && *amplitude_phi_deg >= 0.0) {
                    return Err(Error::config("periodic program: amplitudes must be non-negative"));
                }
            }
        }
        Ok(())
    }

    /// Concrete signal for one episode starting at altitude `h0`. Random
    /// programs draw from a stream determined by the program seed and
    /// `episode`.
    pub fn instantiate(&self, h0: f64, episode: u64, duration: f64) -> ReferenceSignal {
        match self {
            ReferenceProgram::AttitudeSteps {
                theta_min_deg,
                theta_max_deg,
                phi_min_deg,
                phi_max_deg,
                min_hold,
                max_hold,
                min_separation_deg,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(episode);
                let mut draw = |lo: f64, hi: f64| {
                    step_sequence(&mut rng, lo.to_radians(), hi.to_radians(), *min_hold, *max_hold, min_separation_deg.to_radians(), duration)
                };
                let theta = draw(*theta_min_deg, *theta_max_deg);
                let phi = draw(*phi_min_deg, *phi_max_deg);
                ReferenceSignal { h0, shape: Shape::Steps { theta, phi } }
            }
            ReferenceProgram::AltitudeProfile { h_keyframes, phi_keyframes } => ReferenceSignal {
                h0,
                shape: Shape::Keyframes {
                    h: h_keyframes.clone(),
                    phi: phi_keyframes.iter().map(|[t, v]| [*t, v.to_radians()]).collect(),
                },
            },
            ReferenceProgram::AltitudeRandom {
                max_step_h,
                min_climb_rate,
                max_climb_rate,
                phi_max_deg,
                roll_rate_deg,
                min_hold,
                max_hold,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(episode);
                let mut h = vec![[0.0, 0.0]];
                let (mut t, mut level) = (0.0, 0.0);
                while t < duration {
                    t += rng.gen_range(*min_hold..=*max_hold);
                    h.push([t, level]);
                    let dh = rng.gen_range(0.3 * max_step_h..=*max_step_h) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    t += dh.abs() / rng.gen_range(*min_climb_rate..=*max_climb_rate);
                    level += dh;
                    h.push([t, level]);
                }
                let roll_rate = roll_rate_deg.to_radians();
                let mut phi = vec![[0.0, 0.0]];
                let (mut t, mut level) = (0.0, 0.0);
                while t < duration {
                    t += rng.gen_range(*min_hold..=*max_hold);
                    phi.push([t, level]);
                    let next = if level != 0.0 && rng.gen_bool(0.5) {
                        0.0
                    } else {
                        rng.gen_range(-phi_max_deg..=*phi_max_deg).to_radians()
                    };
                    t += (next - level).abs() / roll_rate;
                    level = next;
                    phi.push([t, level]);
                }
                ReferenceSignal { h0, shape: Shape::Keyframes { h, phi } }
            }
            ReferenceProgram::Sinusoidal { period_h, amplitude_h, period_phi, amplitude_phi_deg } => ReferenceSignal {
                h0,
                shape: Shape::Periodic {
                    wave: Wave::Sine,
                    period_h: *period_h,
                    amplitude_h: *amplitude_h,
                    period_phi: *period_phi,
                    amplitude_phi: amplitude_phi_deg.to_radians(),
                },
            },
            ReferenceProgram::Triangular { period_h, amplitude_h, period_phi, amplitude_phi_deg } => ReferenceSignal {
                h0,
                shape: Shape::Periodic {
                    wave: Wave::Triangle,
                    period_h: *period_h,
                    amplitude_h: *amplitude_h,
                    period_phi: *period_phi,
                    amplitude_phi: amplitude_phi_deg.to_radians(),
                },
            },
        }
    }
}

fn step_sequence<R: Rng>(rng: &mut R, lo: f64, hi: f64, min_hold: f64, max_hold: f64, min_sep: f64, duration: f64) -> Vec<[f64; 2]> {
    let mut steps = Vec::new();
    let mut t = 0.0;
    let mut prev: Option<f64> = None;
    while t < duration || steps.len() < 2 {
        let level = loop {
            let v = rng.gen_range(lo..=hi);
            if prev.map_or(true, |p: f64| (v - p).abs() >= min_sep) {
                break v;
            }
        };
        steps.push([t, level]);
        prev = Some(level);
        t += rng.gen_range(min_hold..=max_hold);
    }
    steps
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Wave {
    Sine,
    Triangle,
}

impl Wave {
    fn eval(self, t: f64, period: f64, amplitude: f64) -> f64 {
        let phase = (t / period).rem_euclid(1.0);
        match self {
            Wave::Sine => amplitude * (2.0 * std::f64::consts::PI * phase).sin(),
            Wave::Triangle => {
                let x = if phase < 0.25 {
                    4.0 * phase
                } else if phase < 0.75 {
                    2.0 - 4.0 * phase
                } else {
                    4.0 * phase - 4.0
                };
                amplitude * x
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Steps { theta: Vec<[f64; 2]>, phi: Vec<[f64; 2]> },
    Keyframes { h: Vec<[f64; 2]>, phi: Vec<[f64; 2]> },
    Periodic { wave: Wave, period_h: f64, amplitude_h: f64, period_phi: f64, amplitude_phi: f64 },
}

/// An instantiated reference signal (radians and metres).
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSignal {
    h0: f64,
    shape: Shape,
}

fn step_value(steps: &[[f64; 2]], t: f64) -> f64 {
    let i = steps.partition_point(|s| s[0] <= t);
    steps[i.saturating_sub(1)][1]
}

/// Linear interpolation, held constant outside the keyframe span.
pub fn interpolate(keys: &[[f64; 2]], t: f64) -> f64 {
    let i = keys.partition_point(|k| k[0] <= t);
    if i == 0 {
        return keys[0][1];
    }
    if i == keys.len() {
        return keys[keys.len() - 1][1];
    }
    let ([t0, v0], [t1, v1]) = (keys[i - 1], keys[i]);
    if t1 == t0 {
        v1
    } else {
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }
}

impl ReferenceSignal {
    /// h^R, m.
    pub fn h(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Steps { .. } => self.h0,
            Shape::Keyframes { h, .. } => self.h0 + interpolate(h, t),
            Shape::Periodic { wave, period_h, amplitude_h, .. } => self.h0 + wave.eval(t, *period_h, *amplitude_h),
        }
    }

    /// θ^R, rad; `None` when the outer loop generates it.
    pub fn theta(&self, t: f64) -> Option<f64> {
        match &self.shape {
            Shape::Steps { theta, .. } => Some(step_value(theta, t)),
            _ => None,
        }
    }

    /// φ^R, rad.
    pub fn phi(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Steps { phi, .. } => step_value(phi, t),
            Shape::Keyframes { phi, .. } => interpolate(phi, t),
            Shape::Periodic { wave, period_phi, amplitude_phi, .. } => wave.eval(t, *period_phi, *amplitude_phi),
        }
    }

    /// β^R is zero for every program.
    pub fn beta(&self, _t: f64) -> f64 {
        0.0
    }
}
