use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::run::RunState;
use crate::{Error, Result};

const FORMAT_TAG: &str = "hyperentm-checkpoint";
const FORMAT_VERSION: u32 = 1;

/// Versioned snapshot of a run taken between generations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    format: String,
    version: u32,
    pub config_hash: String,
    pub master_seed: u64,
    pub(crate) state: RunState,
}

impl Checkpoint {
    pub(crate) fn new(config: &ExperimentConfig, state: RunState) -> Self {
        Checkpoint {
            format: FORMAT_TAG.into(),
            version: FORMAT_VERSION,
            config_hash: config.hash(),
            master_seed: config.master_seed,
            state,
        }
    }

    /// Generation the restored run evaluates next.
    pub fn generation(&self) -> usize {
        self.state.generation
    }

    /// Writes to a sibling temporary file, then renames over `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        if path.as_os_str().is_empty() {
            return Err(Error::Checkpoint("empty checkpoint path".into()));
        }
        let json = serde_json::to_string(self)?;
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        std::fs::write(&tmp, json).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        if path.as_os_str().is_empty() {
            return Err(Error::Checkpoint("empty checkpoint path".into()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cp: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
        if cp.format != FORMAT_TAG || cp.version != FORMAT_VERSION {
            return Err(Error::Checkpoint(format!(
                "{}: unsupported checkpoint {} v{}",
                path.display(),
                cp.format,
                cp.version
            )));
        }
        if cp.state.population.is_empty() {
            return Err(Error::Checkpoint(format!("{}: empty population", path.display())));
        }
        Ok(cp)
    }
}
