//! Experiment configuration: TOML layered over validated defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::env::EnvConfig;
use crate::error::{Error, Result};
use crate::fault::ScenarioSpec;
use crate::harness::{SweepConfig, TrainConfig};
use crate::sac::AgentConfig;
use crate::sim::PlantConfig;

/// File name of the resolved configuration written into every run directory.
pub const SNAPSHOT_FILE: &str = "config.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyConfig {
    pub steps: u64,
    pub seeds: usize,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self { steps: 50_000, seeds: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub plant: PlantConfig,
    pub env: EnvConfig,
    pub attitude_agent: AgentConfig,
    pub altitude_agent: AgentConfig,
    pub attitude_train: TrainConfig,
    pub altitude_train: TrainConfig,
    /// Evaluation scenario.
    pub scenario: ScenarioSpec,
    pub sweep: SweepConfig,
    pub toy: ToyConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            output_dir: PathBuf::from("runs"),
            plant: PlantConfig::default(),
            env: EnvConfig::default(),
            attitude_agent: AgentConfig::attitude(),
            altitude_agent: AgentConfig::altitude(),
            attitude_train: TrainConfig::attitude(),
            altitude_train: TrainConfig::altitude(),
            scenario: ScenarioSpec::default(),
            sweep: SweepConfig::default(),
            toy: ToyConfig::default(),
        }
    }
}

impl ExperimentConfig {
    fn check(&self) -> std::result::Result<(), (&'static str, Error)> {
        let tag = |section| move |e| (section, e);
        self.plant.validate().map_err(tag("plant"))?;
        self.env.validate().map_err(tag("env"))?;
        self.attitude_agent.validate().map_err(tag("attitude_agent"))?;
        self.altitude_agent.validate().map_err(tag("altitude_agent"))?;
        self.attitude_train.validate().map_err(tag("attitude_train"))?;
        self.altitude_train.validate().map_err(tag("altitude_train"))?;
        self.scenario.validate().map_err(tag("scenario"))?;
        self.sweep.validate().map_err(tag("sweep"))?;
        if self.toy.seeds == 0 || self.toy.steps == 0 {
            return Err(("toy", Error::config("steps and seeds must be positive")));
        }
        let dims = |a: &AgentConfig, n, m| a.state_dim == n && a.action_dim == m;
        if !dims(&self.attitude_agent, crate::env::ATTITUDE_OBS_DIM, crate::env::ATTITUDE_ACTION_DIM) {
            return Err(("attitude_agent", Error::config("state_dim and action_dim must be 9 and 3")));
        }
        if !dims(&self.altitude_agent, crate::env::ALTITUDE_OBS_DIM, crate::env::ALTITUDE_ACTION_DIM) {
            return Err(("altitude_agent", Error::config("state_dim and action_dim must be 2 and 1")));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check().map_err(|(section, e)| Error::Config(format!("{section}: {}", strip_prefix(&e))))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::config(format!("cannot serialize config: {e}")))
    }

    /// Parses `text` layered over the defaults. `origin` is only used in
    /// error messages.
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        let fail = |message: String| Error::ConfigParse { path: origin.to_path_buf(), message };
        let user: toml::Table = text.parse().map_err(|e: toml::de::Error| fail(e.to_string().trim_end().to_string()))?;
        let mut merged = toml::Table::try_from(Self::default()).map_err(|e| fail(e.to_string()))?;
        merge(&mut merged, &user);
        let cfg: Self = serde_path_to_error::deserialize(toml::Value::Table(merged)).map_err(|e| {
            let key = e.path().to_string();
            let inner = e.inner().to_string();
            let msg = inner.lines().next().unwrap_or_default().trim().to_string();
            fail(format!("key `{key}`{}: {msg}", line_suffix(text, &key)))
        })?;
        cfg.check().map_err(|(section, e)| {
            let msg = strip_prefix(&e);
            let key = user_keys(&user, section).into_iter().find(|k| {
                let leaf = k.rsplit('.').next().unwrap_or(k);
                msg.contains(leaf)
            });
            match key {
                Some(k) => fail(format!("key `{k}`{}: {msg}", line_suffix(text, &k))),
                None => fail(format!("{section}: {msg}")),
            }
        })?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ConfigRead { path: path.to_path_buf(), message: e.to_string() })?;
        Self::from_toml(&text, path)
    }

    /// Writes the resolved configuration to `dir/config.toml`.
    pub fn write_snapshot(&self, dir: impl AsRef<Path>) -> Result<PathBuf> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let path = dir.join(SNAPSHOT_FILE);
        std::fs::write(&path, self.to_toml()?)?;
        Ok(path)
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

/// Recursive table merge. A table whose `kind` tag changes is replaced
/// wholesale, since its fields belong to a different variant.
fn merge(base: &mut toml::Table, user: &toml::Table) {
    for (k, v) in user {
        match (base.get_mut(k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) if u.get("kind").map_or(true, |kind| b.get("kind") == Some(kind)) => {
                merge(b, u)
            }
            _ => {
                base.insert(k.clone(), v.clone());
            }
        }
    }
}

fn user_keys(user: &toml::Table, section: &str) -> Vec<String> {
    fn walk(t: &toml::Table, prefix: &str, out: &mut Vec<String>) {
        for (k, v) in t {
            let path = format!("{prefix}.{k}");
            match v {
                toml::Value::Table(sub) => walk(sub, &path, out),
                _ => out.push(path),
            }
        }
    }
    let mut out = Vec::new();
    match user.get(section) {
        Some(toml::Value::Table(t)) => walk(t, section, &mut out),
        Some(_) => out.push(section.to_string()),
        None => {}
    }
    out
}

fn line_suffix(text: &str, key: &str) -> String {
    locate_key(text, key).map(|l| format!(" (line {l})")).unwrap_or_default()
}

/// 1-based line on which dotted `key` (or its nearest enclosing table) is
/// written in `text`.
pub fn locate_key(text: &str, key: &str) -> Option<usize> {
    let key = key.split('[').next().unwrap_or(key);
    let unquote = |s: &str| s.split('.').map(|p| p.trim().trim_matches('"').trim_matches('\'')).collect::<Vec<_>>().join(".");
    let mut prefix = String::new();
    let mut best: Option<(usize, usize)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let full = if let Some(h) = line.strip_prefix('[') {
            if line.starts_with("[[") {
                continue;
            }
            prefix = unquote(h.split(']').next().unwrap_or(""));
            prefix.clone()
        } else if let Some((lhs, _)) = line.split_once('=') {
            if line.starts_with('#') {
                continue;
            }
            let k = unquote(lhs);
            if prefix.is_empty() {
                k
            } else {
                format!("{prefix}.{k}")
            }
        } else {
            continue;
        };
        if full == key {
            return Some(i + 1);
        }
        if key.starts_with(&format!("{full}.")) && best.map_or(true, |(len, _)| full.len() > len) {
            best = Some((full.len(), i + 1));
        }
    }
    best.map(|(_, l)| l)
}
