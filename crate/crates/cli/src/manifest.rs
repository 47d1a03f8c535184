//! Run manifest: config hash, seeds, per-stage timings, artifacts and
//! summary metrics.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::io::write_atomic;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub seconds: f64,
    /// Paths relative to the output directory.
    pub artifacts: Vec<String>,
    pub metrics: BTreeMap<String, f64>,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub stages: BTreeMap<String, StageRecord>,
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            config_hash: config.hash(),
            seed: config.seed,
            config: config.clone(),
            stages: BTreeMap::new(),
        }
    }

    /// Loads the manifest in `out`, starting afresh when it is absent or was
    /// written for a different config.
    pub fn open(out: &Path, config: &ExperimentConfig) -> Result<Self> {
        let path = out.join(MANIFEST_FILE);
        if !path.is_file() {
            return Ok(Self::new(config));
        }
        let existing: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Ok(if existing.config_hash == config.hash() { existing } else { Self::new(config) })
    }

    pub fn read(out: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(out.join(MANIFEST_FILE))?)?)
    }

    pub fn save(&self, out: &Path) -> Result<()> {
        write_atomic(&out.join(MANIFEST_FILE), serde_json::to_string_pretty(self)?.as_bytes())
    }

    pub fn metric(&self, stage: &str, name: &str) -> Option<f64> {
        self.stages.get(stage)?.metrics.get(name).copied()
    }
}
