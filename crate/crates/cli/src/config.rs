//! Experiment configuration files.
//!
//! A config is a TOML document. When its top level carries
//! `preset = "<name>"`, the named built-in preset is loaded first and the
//! file's tables are merged over it key by key, so a file only has to list
//! what it changes.

use std::fmt;
use std::path::{Path, PathBuf};

use qimpc_core::circuits::VqcPolicy;
use qimpc_core::control::{LossSpec, MpcConfig, OptimizerConfig};
use qimpc_core::plants::PlantModel;
use serde::{Deserialize, Serialize};

use crate::presets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    TargetTracking,
    Building,
    Vehicle,
    Pendulum,
    DoublePendulum,
    Custom,
}

impl ExperimentId {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::TargetTracking => "target-tracking",
            Self::Building => "building",
            Self::Vehicle => "vehicle",
            Self::Pendulum => "pendulum",
            Self::DoublePendulum => "double-pendulum",
            Self::Custom => "custom",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotOptions {
    /// Draw the loss curve on a log10 axis.
    #[serde(default)]
    pub log_loss: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub plant: PlantModel,
    pub policy: VqcPolicy,
    pub loss: LossSpec,
    pub mpc: MpcConfig,
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub plot: PlotOptions,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("unknown preset `{0}`, expected one of: {names}", names = presets::PRESET_NAMES.join(", "))]
    UnknownPreset(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl From<qimpc_core::Error> for ConfigError {
    fn from(e: qimpc_core::Error) -> Self {
        Self::Invalid(e.to_string())
    }
}

impl ExperimentConfig {
    /// Field-level checks plus cross-checks between plant, policy, loss and
    /// loop settings.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.seeds.is_empty() {
            return Err(ConfigError::Invalid("seeds must list at least one seed".into()));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return Err(ConfigError::Invalid("seeds must be distinct".into()));
        }
        self.plant.validate()?;
        self.policy.validate()?;
        self.loss.validate()?;
        self.mpc.validate()?;
        self.optimizer.validate()?;

        let plant = self.plant.as_plant();
        let (s, m) = (plant.state_dim(), plant.control_dim());
        self.loss.check_dims(s, m)?;
        let checks = [
            (
                "policy.encoder.feature_wires",
                self.policy.encoder.feature_wires.len(),
                s,
            ),
            ("policy.head.readout_wires", self.policy.control_dim(), m),
            ("mpc.u_min", self.mpc.u_min.len(), m),
            ("mpc.initial_state", self.mpc.initial_state.len(), s),
        ];
        for (field, got, want) in checks {
            if got != want {
                return Err(ConfigError::Invalid(format!(
                    "{field} has {got} entries but the {} plant needs {want}",
                    plant.name()
                )));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    /// Output directory: `override_dir`, then `output_dir`, then
    /// `$QIMPC_OUT/<experiment>`, then `out/<experiment>`.
    pub fn resolve_output_dir(&self, override_dir: Option<&Path>) -> PathBuf {
        if let Some(dir) = override_dir {
            return dir.to_path_buf();
        }
        if let Some(dir) = &self.output_dir {
            return dir.clone();
        }
        let root = std::env::var_os(OUTPUT_ROOT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("out"));
        root.join(self.experiment.as_str())
    }
}

/// Environment variable overriding the default output root.
pub const OUTPUT_ROOT_ENV: &str = "QIMPC_OUT";

fn merge(base: &mut toml::Table, overlay: toml::Table) {
    for (key, value) in overlay {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => {
                // A different variant tag replaces the whole table.
                if o.get("kind").is_some_and(|k| b.get("kind") != Some(k)) {
                    *b = o;
                } else {
                    merge(b, o);
                }
            }
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}

/// Parses and validates a config document. `origin` only labels errors.
pub fn parse_config(text: &str, origin: &Path) -> Result<ExperimentConfig, ConfigError> {
    let parse_err = |e: toml::de::Error| ConfigError::Parse {
        path: origin.to_path_buf(),
        message: e.to_string().trim_end().to_string(),
    };
    let mut table: toml::Table = toml::from_str(text).map_err(parse_err)?;
    let table = match table.remove("preset") {
        None => table,
        Some(toml::Value::String(name)) => {
            let base = presets::builtin(&name).ok_or(ConfigError::UnknownPreset(name))?;
            let mut merged: toml::Table = toml::from_str(&base.to_toml()).expect("preset round-trips");
            merge(&mut merged, table);
            merged
        }
        Some(other) => {
            return Err(ConfigError::Parse {
                path: origin.to_path_buf(),
                message: format!("`preset` must be a string, got {}", other.type_str()),
            })
        }
    };
    let cfg: ExperimentConfig = table.try_into().map_err(parse_err)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Loads a config from `path`. A path that does not exist is retried with a
/// `.toml` extension and then as a built-in preset name, so
/// `presets/pendulum` and `pendulum` both work.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let with_ext = path.with_extension("toml");
    let file = if path.is_file() {
        Some(path)
    } else if with_ext.is_file() {
        Some(with_ext.as_path())
    } else {
        None
    };
    match file {
        Some(file) => {
            let text = std::fs::read_to_string(file).map_err(|source| ConfigError::Io {
                path: file.to_path_buf(),
                source,
            })?;
            parse_config(&text, file)
        }
        None => {
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
            match presets::builtin(name) {
                Some(cfg) => Ok(cfg),
                None => Err(ConfigError::Io {
                    path: path.to_path_buf(),
                    source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or preset"),
                }),
            }
        }
    }
}
