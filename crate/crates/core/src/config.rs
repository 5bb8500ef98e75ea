//! JSON run configuration: parsing, strict validation, and the mapping to
//! a mechanism initializer.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::{AttackerConfig, AttackerConfigError};
use crate::sortition::{SortitionError, SortitionParams};
use crate::state::MechanismInit;
use crate::whisk::{WhiskError, WhiskParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MechanismChoice {
    StatusQuo,
    Whisk,
    Hsortition,
}

/// Where the runner writes, relative to the invoker's choice of directory.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Directory for per-seed report files; the CLI's `--out` overrides it,
    /// and the current directory is the fallback.
    pub report_dir: Option<String>,
    /// Also emit the per-slot chain-activity CSV next to each report.
    pub chain_activity: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub validators: usize,
    /// Measured epochs per run; warm-up slots are prepended, not counted.
    pub epochs: u64,
    pub mechanism: MechanismChoice,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub attacker: AttackerConfig,
    /// Shuffle-election sizing override; omitted, the sizes scale from the
    /// validator count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub whisk: Option<WhiskParams>,
    #[serde(default)]
    pub hsortition: SortitionParams,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    /// Malformed JSON, unknown fields, missing fields, and type mismatches;
    /// the message carries the field path.
    #[error("config rejected: {0}")]
    Json(String),
    #[error("validators must be at least 1")]
    NoValidators,
    #[error("epochs must be at least 1")]
    NoEpochs,
    #[error("seeds must be non-empty")]
    NoSeeds,
    #[error("seeds contains duplicates (seed {0})")]
    DuplicateSeed(u64),
    #[error(transparent)]
    Attacker(#[from] AttackerConfigError),
    #[error("whisk override is only valid with mechanism = whisk")]
    WhiskOverrideUnused,
    #[error("whisk override: {0}")]
    Whisk(#[from] WhiskError),
    #[error("hsortition settings are only valid with mechanism = hsortition")]
    SortitionSettingsUnused,
    #[error("hsortition: {0}")]
    Sortition(#[from] SortitionError),
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.validators == 0 {
            return Err(ConfigError::NoValidators);
        }
        if self.epochs == 0 {
            return Err(ConfigError::NoEpochs);
        }
        if self.seeds.is_empty() {
            return Err(ConfigError::NoSeeds);
        }
        let mut seen = std::collections::BTreeSet::new();
        for &s in &self.seeds {
            if !seen.insert(s) {
                return Err(ConfigError::DuplicateSeed(s));
            }
        }
        self.attacker.validate(self.validators)?;
        match self.mechanism {
            MechanismChoice::Whisk => {
                if let Some(params) = &self.whisk {
                    params.validate()?;
                }
            }
            _ if self.whisk.is_some() => return Err(ConfigError::WhiskOverrideUnused),
            _ => {}
        }
        match self.mechanism {
            MechanismChoice::Hsortition => self.hsortition.validate()?,
            _ if self.hsortition != SortitionParams::default() => {
                return Err(ConfigError::SortitionSettingsUnused)
            }
            _ => {}
        }
        Ok(())
    }

    pub fn mechanism_init(&self) -> MechanismInit {
        match self.mechanism {
            MechanismChoice::StatusQuo => MechanismInit::StatusQuo,
            MechanismChoice::Whisk => MechanismInit::Whisk(self.whisk),
            MechanismChoice::Hsortition => MechanismInit::Sortition(self.hsortition),
        }
    }
}

/// Parses and fully validates a JSON config. Unknown fields are rejected
/// and every failure names what is wrong.
pub fn parse_config(text: &str) -> Result<SimulationConfig, ConfigError> {
    let cfg: SimulationConfig =
        serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
