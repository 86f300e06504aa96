use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::copytask::{FitnessBand, SOLUTION_THRESHOLD};
use crate::neat::EvolutionParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    DirectNeat,
    Hyperneat,
    HyperneatSeeded,
    HyperneatChampionSeeded,
}

impl Encoding {
    pub fn is_indirect(self) -> bool {
        self != Encoding::DirectNeat
    }

    /// Default evolution parameters for this encoding.
    pub fn preset(self) -> EvolutionParams {
        match self {
            Encoding::DirectNeat => EvolutionParams::neat(),
            _ => EvolutionParams::hyperneat(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandChoice {
    #[default]
    Continuous,
    Literal,
}

impl BandChoice {
    pub fn band(self) -> FitnessBand {
        match self {
            BandChoice::Continuous => FitnessBand::CONTINUOUS,
            BandChoice::Literal => FitnessBand::LITERAL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub encoding: Encoding,
    pub bits: usize,
    pub params: EvolutionParams,
    pub master_seed: u64,
    pub solution_threshold: f64,
    pub champion_seed_path: Option<PathBuf>,
    pub fitness_band: BandChoice,
    /// Fresh training batteries a candidate must pass before the run counts as solved.
    pub confirmations: usize,
    /// Generations between checkpoints; 0 disables them.
    pub checkpoint_every: usize,
}

/// Flat config file. Every key is optional except `encoding` and `bits`;
/// missing rates fall back to the encoding's preset.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    encoding: Encoding,
    bits: usize,
    population_size: Option<usize>,
    elitism_fraction: Option<f64>,
    sexual_fraction: Option<f64>,
    weight_mutation_prob: Option<f64>,
    add_connection_prob: Option<f64>,
    remove_connection_prob: Option<f64>,
    add_node_prob: Option<f64>,
    remove_node_prob: Option<f64>,
    complexity_threshold: Option<usize>,
    complexity_regulation: Option<bool>,
    max_generations: Option<usize>,
    species_count: Option<usize>,
    solution_threshold: Option<f64>,
    champion_seed_path: Option<PathBuf>,
    fitness_band: Option<BandChoice>,
    confirmations: Option<usize>,
    checkpoint_every: Option<usize>,
}

impl ExperimentConfig {
    /// Preset configuration for `encoding` at `bits`.
    pub fn preset(encoding: Encoding, bits: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            encoding,
            bits,
            params: encoding.preset(),
            master_seed,
            solution_threshold: SOLUTION_THRESHOLD,
            champion_seed_path: None,
            fitness_band: BandChoice::Continuous,
            confirmations: 3,
            checkpoint_every: 50,
        }
    }

    /// Parses and validates the flat TOML format. Relative
    /// `champion_seed_path` values are resolved against `base_dir`.
    pub fn from_toml(text: &str, master_seed: u64, base_dir: Option<&Path>) -> Result<Self> {
        let c = Self::parse_toml(text, master_seed, base_dir)?;
        c.validate()?;
        Ok(c)
    }

    /// Parses without the final validation, for callers that override fields.
    pub fn parse_toml(text: &str, master_seed: u64, base_dir: Option<&Path>) -> Result<Self> {
        let f: ConfigFile =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        let mut c = ExperimentConfig::preset(f.encoding, f.bits, master_seed);
        let p = &mut c.params;
        macro_rules! set {
            ($($field:ident),*) => {$(if let Some(v) = f.$field { p.$field = v; })*};
        }
        set!(
            population_size,
            elitism_fraction,
            sexual_fraction,
            weight_mutation_prob,
            add_connection_prob,
            remove_connection_prob,
            add_node_prob,
            remove_node_prob,
            max_generations,
            species_count
        );
        if let Some(t) = f.complexity_threshold {
            p.complexity_threshold = Some(t);
        }
        if f.complexity_regulation == Some(false) {
            p.complexity_threshold = None;
        }
        if let Some(v) = f.solution_threshold {
            c.solution_threshold = v;
        }
        c.champion_seed_path = f.champion_seed_path.map(|path| match base_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path,
        });
        if let Some(v) = f.fitness_band {
            c.fitness_band = v;
        }
        if let Some(v) = f.confirmations {
            c.confirmations = v;
        }
        if let Some(v) = f.checkpoint_every {
            c.checkpoint_every = v;
        }
        Ok(c)
    }

    pub fn load(path: &Path, master_seed: u64) -> Result<Self> {
        let c = Self::load_unchecked(path, master_seed)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load_unchecked(path: &Path, master_seed: u64) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_toml(&text, master_seed, path.parent())
    }

    pub fn validate(&self) -> Result<()> {
        if self.bits == 0 {
            return Err(Error::Config("bits must be at least 1".into()));
        }
        self.params.validate()?;
        if !(self.solution_threshold > 0.0 && self.solution_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "solution_threshold must lie in (0, 1], got {}",
                self.solution_threshold
            )));
        }
        let seeded = self.encoding == Encoding::HyperneatChampionSeeded;
        match (&self.champion_seed_path, seeded) {
            (None, true) => Err(Error::Config(
                "champion_seed_path is required for hyperneat_champion_seeded".into(),
            )),
            (Some(_), false) => Err(Error::Config(
                "champion_seed_path is only valid with hyperneat_champion_seeded".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn band(&self) -> FitnessBand {
        self.fitness_band.band()
    }

    /// Hash of everything that shapes the trajectory. The generation budget
    /// and checkpoint cadence are left out so a run can be extended on resume.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.params.max_generations = 0;
        c.checkpoint_every = 0;
        let json = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
