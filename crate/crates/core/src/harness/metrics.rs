//! Tracking metrics and summary statistics.

use serde::{Deserialize, Serialize};

use crate::env::EpisodeRow;

/// Normalization range for the zero-referenced sideslip angle, deg.
pub const SIDESLIP_RANGE_DEG: f64 = 10.0;
/// nMAE success threshold.
pub const SUCCESS_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelMetric {
    pub name: String,
    /// Mean absolute error in channel units (m or deg).
    pub mae: f64,
    /// Normalization range in channel units.
    pub range: f64,
    pub nmae: f64,
}

impl ChannelMetric {
    /// `range = None` normalizes by the reference range, falling back to
    /// `fallback` when the reference is constant.
    pub fn from_series(name: &str, reference: &[f64], actual: &[f64], range: Option<f64>, fallback: f64) -> Self {
        let n = reference.len().min(actual.len());
        let mae = if n == 0 {
            0.0
        } else {
            reference.iter().zip(actual).map(|(r, x)| (r - x).abs()).sum::<f64>() / n as f64
        };
        let range = range.unwrap_or_else(|| {
            let (lo, hi) = reference.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            if hi - lo > 1e-9 {
                hi - lo
            } else {
                fallback
            }
        });
        Self { name: name.to_string(), mae, range, nmae: mae / range }
    }
}

/// Evaluation of one deterministic episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub scenario: String,
    pub channels: Vec<ChannelMetric>,
    /// Mean of the channel nMAEs.
    pub nmae: f64,
    pub success: bool,
    pub aborted: Option<String>,
    /// Simulated time reached, s.
    pub completed: f64,
    #[serde(skip)]
    pub trajectory: Vec<EpisodeRow>,
}

impl EvalReport {
    pub fn new(scenario: &str, channels: Vec<ChannelMetric>, aborted: Option<String>, completed: f64, trajectory: Vec<EpisodeRow>) -> Self {
        let nmae = channels.iter().map(|c| c.nmae).sum::<f64>() / channels.len().max(1) as f64;
        let success = aborted.is_none() && nmae < SUCCESS_THRESHOLD;
        Self { scenario: scenario.to_string(), channels, nmae, success, aborted, completed, trajectory }
    }

    pub fn channel(&self, name: &str) -> Option<&ChannelMetric> {
        self.channels.iter().find(|c| c.name == name)
    }

    /// Largest single-channel nMAE.
    pub fn worst_channel(&self) -> f64 {
        self.channels.iter().map(|c| c.nmae).fold(0.0, f64::max)
    }
}

/// Altitude, roll and sideslip metrics of a cascaded episode.
pub fn cascade_channels(rows: &[EpisodeRow]) -> Vec<ChannelMetric> {
    let col = |f: fn(&EpisodeRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    vec![
        ChannelMetric::from_series("h", &col(|r| r.h_ref), &col(|r| r.h), None, SIDESLIP_RANGE_DEG),
        ChannelMetric::from_series("phi", &col(|r| r.phi_ref_deg), &col(|r| r.phi_deg), None, SIDESLIP_RANGE_DEG),
        ChannelMetric::from_series("beta", &col(|r| r.beta_ref_deg), &col(|r| r.beta_deg), Some(SIDESLIP_RANGE_DEG), SIDESLIP_RANGE_DEG),
    ]
}

/// Pitch, roll and sideslip metrics of an attitude episode.
pub fn attitude_channels(rows: &[EpisodeRow]) -> Vec<ChannelMetric> {
    let col = |f: fn(&EpisodeRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    vec![
        ChannelMetric::from_series("theta", &col(|r| r.theta_ref_deg), &col(|r| r.theta_deg), None, SIDESLIP_RANGE_DEG),
        ChannelMetric::from_series("phi", &col(|r| r.phi_ref_deg), &col(|r| r.phi_deg), None, SIDESLIP_RANGE_DEG),
        ChannelMetric::from_series("beta", &col(|r| r.beta_ref_deg), &col(|r| r.beta_deg), Some(SIDESLIP_RANGE_DEG), SIDESLIP_RANGE_DEG),
    ]
}

/// Trailing moving average; the first entries average over what is available.
pub fn smooth(values: &[f64], window: usize) -> Vec<f64> {
    let w = window.max(1);
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for (i, v) in values.iter().enumerate() {
        sum += v;
        if i >= w {
            sum -= values[i - w];
        }
        out.push(sum / (i + 1).min(w) as f64);
    }
    out
}

/// Wilson score interval for `successes / n` at normal quantile `z`.
pub fn wilson_interval(successes: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothing_window() {
        assert_eq!(smooth(&[1.0, 3.0, 5.0, 7.0], 2), vec![1.0, 2.0, 4.0, 6.0]);
    }

    #[test]
    fn degenerate_reference_uses_fallback() {
        let m = ChannelMetric::from_series("phi", &[5.0, 5.0], &[4.0, 6.0], None, 10.0);
        assert_eq!(m.range, 10.0);
        assert_eq!(m.nmae, 0.1);
    }
}
