//! Failure cases, biased sensor noise, and discrete vertical gusts.
//!
//! All transformations are pure functions of the spec, the time, and their
//! inputs; noise draws come from an RNG owned by the caller.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::ReferenceProgram;
use crate::sim::{AeroModel, ControlInput, Ifc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    None,
    RudderJam,
    AileronEff,
    ElevatorRange,
    HtailLoss,
    Icing,
    CgShift,
}

impl FailureKind {
    pub const ALL: [FailureKind; 7] = [
        FailureKind::None,
        FailureKind::RudderJam,
        FailureKind::AileronEff,
        FailureKind::ElevatorRange,
        FailureKind::HtailLoss,
        FailureKind::Icing,
        FailureKind::CgShift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FailureKind::None => "none",
            FailureKind::RudderJam => "rudder_jam",
            FailureKind::AileronEff => "aileron_eff",
            FailureKind::ElevatorRange => "elevator_range",
            FailureKind::HtailLoss => "htail_loss",
            FailureKind::Icing => "icing",
            FailureKind::CgShift => "cg_shift",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::config(format!("unknown failure kind `{name}`")))
    }
}

/// Failure magnitudes; only the fields of the active kind are used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FailureParams {
    pub rudder_jam_deg: f64,
    pub aileron_effectiveness: f64,
    pub elevator_limit_deg: f64,
    pub htail_effectiveness: f64,
    pub icing_cl_max_factor: f64,
    pub icing_cd0_increase: f64,
    /// Longitudinal c.g. offset after the shift, m (negative is aft).
    pub cg_offset: f64,
}

impl Default for FailureParams {
    fn default() -> Self {
        Self {
            rudder_jam_deg: -15.0,
            aileron_effectiveness: 0.3,
            elevator_limit_deg: 2.5,
            htail_effectiveness: 0.3,
            icing_cl_max_factor: 0.7,
            icing_cd0_increase: 0.06,
            cg_offset: -0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FailureSpec {
    pub kind: FailureKind,
    /// Onset time, s.
    pub onset: f64,
    pub params: FailureParams,
}

impl Default for FailureSpec {
    fn default() -> Self {
        Self::none()
    }
}

impl FailureSpec {
    pub fn none() -> Self {
        Self { kind: FailureKind::None, onset: 0.0, params: FailureParams::default() }
    }

    pub fn new(kind: FailureKind, onset: f64) -> Self {
        Self { kind, onset, params: FailureParams::default() }
    }

    /// Preset onset for each kind.
    pub fn preset(kind: FailureKind) -> Self {
        let onset = match kind {
            FailureKind::None => 0.0,
            FailureKind::RudderJam | FailureKind::ElevatorRange | FailureKind::HtailLoss => 10.0,
            FailureKind::Icing | FailureKind::CgShift => 20.0,
            FailureKind::AileronEff => 30.0,
        };
        Self::new(kind, onset)
    }

    pub fn is_active(&self, t: f64) -> bool {
        self.kind != FailureKind::None && t >= self.onset
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        if !(self.onset.is_finite() && self.onset >= 0.0) {
            return Err(Error::config("failure.onset must be a non-negative time"));
        }
        if !(0.0..=1.0).contains(&p.aileron_effectiveness) || !(0.0..=1.0).contains(&p.htail_effectiveness) {
            return Err(Error::config("failure effectiveness factors must lie in [0, 1]"));
        }
        if !(p.elevator_limit_deg > 0.0) {
            return Err(Error::config("failure.params.elevator_limit_deg must be positive"));
        }
        if !(p.icing_cl_max_factor > 0.0 && p.icing_cl_max_factor <= 1.0 && p.icing_cd0_increase >= 0.0) {
            return Err(Error::config("icing parameters out of range"));
        }
        if ![p.rudder_jam_deg, p.cg_offset].iter().all(|v| v.is_finite()) {
            return Err(Error::config("failure parameters must be finite"));
        }
        Ok(())
    }
}

/// Effective surfaces and aerodynamic model at time `t`. Identity before
/// onset.
pub fn apply_failure(spec: &FailureSpec, t: f64, surfaces: ControlInput, model: &AeroModel) -> (ControlInput, AeroModel) {
    let mut s = surfaces;
    let mut m = model.clone();
    if !spec.is_active(t) {
        return (s, m);
    }
    let p = &spec.params;
    match spec.kind {
        FailureKind::None => {}
        FailureKind::RudderJam => s.rudder = p.rudder_jam_deg.to_radians(),
        FailureKind::AileronEff => s.aileron *= p.aileron_effectiveness,
        FailureKind::ElevatorRange => {
            let lim = p.elevator_limit_deg.to_radians();
            s.elevator = s.elevator.clamp(-lim, lim);
        }
        FailureKind::HtailLoss => {
            let k = p.htail_effectiveness;
            m.cl_de *= k;
            m.cd_de *= k;
            m.cm_de *= k;
            m.cm_q *= k;
        }
        FailureKind::Icing => {
            m.cl_max *= p.icing_cl_max_factor;
            m.cd0 += p.icing_cd0_increase;
        }
        FailureKind::CgShift => m.cg_offset = p.cg_offset,
    }
    (s, m)
}

/// Bias and standard deviation of one sensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorNoise {
    pub ssd: f64,
    pub bias: f64,
}

impl SensorNoise {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let xi: f64 = rng.sample(StandardNormal);
        self.bias + self.ssd * xi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSpec {
    pub enabled: bool,
    pub seed: u64,
    /// p, q, r, rad/s.
    pub rates: SensorNoise,
    /// θ, φ, rad.
    pub attitude: SensorNoise,
    /// β, rad.
    pub sideslip: SensorNoise,
    /// h, m.
    pub altitude: SensorNoise,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            enabled: false,
            seed: 0,
            rates: SensorNoise { ssd: 6.3e-4, bias: 3.0e-5 },
            attitude: SensorNoise { ssd: 3.2e-5, bias: 4.0e-3 },
            sideslip: SensorNoise { ssd: 2.7e-4, bias: 1.8e-3 },
            altitude: SensorNoise { ssd: 6.7e-2, bias: 8.0e-3 },
        }
    }
}

impl NoiseSpec {
    pub fn enabled() -> Self {
        Self { enabled: true, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for n in [self.rates, self.attitude, self.sideslip, self.altitude] {
            if !(n.ssd >= 0.0 && n.ssd.is_finite() && n.bias.is_finite()) {
                return Err(Error::config("noise: SSD must be non-negative and biases finite"));
            }
        }
        Ok(())
    }
}

/// Signals the controllers observe. Surface positions are not included: the
/// agents see their own commanded input, which is noise-free.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Measurement {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub beta: f64,
    pub h: f64,
}

impl Measurement {
    pub fn from_state(s: &crate::sim::AircraftState) -> Self {
        Self { p: s.p, q: s.q, r: s.r, theta: s.theta, phi: s.phi, beta: s.beta(), h: s.h }
    }
}

/// Adds bias plus white noise to every measured signal; identity when
/// disabled (and then no random numbers are drawn).
pub fn observe<R: Rng + ?Sized>(truth: &Measurement, noise: &NoiseSpec, rng: &mut R) -> Measurement {
    if !noise.enabled {
        return *truth;
    }
    Measurement {
        p: truth.p + noise.rates.sample(rng),
        q: truth.q + noise.rates.sample(rng),
        r: truth.r + noise.rates.sample(rng),
        theta: truth.theta + noise.attitude.sample(rng),
        phi: truth.phi + noise.attitude.sample(rng),
        beta: truth.beta + noise.sideslip.sample(rng),
        h: truth.h + noise.altitude.sample(rng),
    }
}

/// 15 ft/s in m/s.
pub const GUST_SPEED_DEFAULT: f64 = 4.572;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GustSpec {
    pub enabled: bool,
    /// Vertical gust speed, m/s (positive up).
    pub speed: f64,
    pub start_times: Vec<f64>,
    pub duration: f64,
}

impl Default for GustSpec {
    fn default() -> Self {
        Self { enabled: false, speed: GUST_SPEED_DEFAULT, start_times: vec![20.0, 75.0], duration: 3.0 }
    }
}

impl GustSpec {
    pub fn enabled() -> Self {
        Self { enabled: true, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) {
            return Err(Error::config("gust.duration must be positive"));
        }
        if !self.speed.is_finite() || self.start_times.iter().any(|t| !t.is_finite()) {
            return Err(Error::config("gust parameters must be finite"));
        }
        Ok(())
    }
}

/// Angle-of-attack offset of the discrete gust: `atan(w_g/V)` inside each
/// window `[start, start + duration)`, zero elsewhere.
pub fn gust_alpha_offset(spec: &GustSpec, t: f64, airspeed: f64) -> f64 {
    if !spec.enabled || airspeed <= 0.0 {
        return 0.0;
    }
    let active = spec.start_times.iter().any(|&s| t >= s && t < s + spec.duration);
    if active {
        (spec.speed / airspeed).atan()
    } else {
        0.0
    }
}

/// A complete evaluation or training condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSpec {
    pub failure: FailureSpec,
    pub noise: NoiseSpec,
    pub gust: GustSpec,
    pub ifc: Ifc,
    pub program: ReferenceProgram,
    /// Episode duration, s.
    pub duration: f64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            failure: FailureSpec::none(),
            noise: NoiseSpec::default(),
            gust: GustSpec::default(),
            ifc: Ifc::default(),
            program: ReferenceProgram::altitude_profile(),
            duration: ReferenceProgram::ALTITUDE_PROFILE_DURATION,
        }
    }
}

impl ScenarioSpec {
    pub const PRESET_NAMES: [&'static str; 8] = [
        "nominal",
        "rudder_jam",
        "aileron_eff",
        "elevator_range",
        "htail_loss",
        "icing",
        "cg_shift",
        "noise_gust",
    ];

    /// Named preset: nominal, one of the six failure cases, or biased sensor
    /// noise with gusts. All run the climbing-turn altitude task at the
    /// nominal initial condition.
    pub fn preset(name: &str) -> Result<Self> {
        let base = Self::default();
        match name {
            "nominal" => Ok(base),
            "noise_gust" => Ok(Self { noise: NoiseSpec::enabled(), gust: GustSpec::enabled(), ..base }),
            other => match FailureKind::from_name(other) {
                Ok(kind) if kind != FailureKind::None => Ok(Self { failure: FailureSpec::preset(kind), ..base }),
                _ => Err(Error::UnknownScenario(name.to_string())),
            },
        }
    }

    pub fn failure_presets() -> Vec<(&'static str, Self)> {
        Self::PRESET_NAMES[1..7].iter().map(|n| (*n, Self::preset(n).expect("known preset"))).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.failure.validate()?;
        self.noise.validate()?;
        self.gust.validate()?;
        self.ifc.validate()?;
        self.program.validate()?;
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::config("scenario.duration must be positive"));
        }
        Ok(())
    }
}
