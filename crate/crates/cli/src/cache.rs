//! On-disk ground-state cache keyed by [`ExperimentConfig::state_key`].
//!
//! [`ExperimentConfig::state_key`]: crate::config::ExperimentConfig::state_key

use std::path::{Path, PathBuf};

use qka::statevec::StateVector;

use crate::error::{CliError, Result};
use crate::io::write_atomic;

#[derive(Debug, Clone)]
pub struct StateCache {
    dir: PathBuf,
}

impl StateCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.qksv"))
    }

    pub fn contains(&self, key: &str) -> bool {
        self.path(key).is_file()
    }

    pub fn load(&self, key: &str) -> Result<StateVector> {
        let path = self.path(key);
        let file = std::fs::File::open(&path).map_err(|_| CliError::MissingInput {
            path: path.clone(),
            hint: "ground state not cached; run `qka groundstate` with the same config first".into(),
        })?;
        Ok(StateVector::read_from(std::io::BufReader::new(file))?)
    }

    pub fn store(&self, key: &str, psi: &StateVector) -> Result<()> {
        let mut bytes = Vec::with_capacity(16 * psi.dim() + 12);
        psi.write_to(&mut bytes)?;
        write_atomic(&self.path(key), &bytes)
    }
}
