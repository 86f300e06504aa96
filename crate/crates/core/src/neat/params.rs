use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Reproduction and mutation settings for one evolutionary run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    pub population_size: usize,
    pub elitism_fraction: f64,
    /// Share of non-elite offspring produced by crossover + mutation.
    pub sexual_fraction: f64,
    /// Per-genome probability of a weight mutation pass.
    pub weight_mutation_prob: f64,
    pub add_connection_prob: f64,
    pub remove_connection_prob: f64,
    pub add_node_prob: f64,
    pub remove_node_prob: f64,
    /// Connection genes allowed above the regulation floor; `None` disables regulation.
    pub complexity_threshold: Option<usize>,
    pub max_generations: usize,
    pub species_count: usize,
}

impl EvolutionParams {
    /// Rates for direct controller genomes.
    pub fn neat() -> Self {
        EvolutionParams {
            population_size: 500,
            elitism_fraction: 0.02,
            sexual_fraction: 0.5,
            weight_mutation_prob: 0.988,
            add_connection_prob: 0.09,
            remove_connection_prob: 0.05,
            add_node_prob: 0.0005,
            remove_node_prob: 0.0,
            complexity_threshold: Some(10),
            max_generations: 10_000,
            species_count: 10,
        }
    }

    /// Rates for CPPN genomes.
    pub fn hyperneat() -> Self {
        EvolutionParams {
            add_connection_prob: 0.01,
            remove_connection_prob: 0.01,
            add_node_prob: 0.001,
            remove_node_prob: 0.001,
            ..Self::neat()
        }
    }

    /// Same rates with every mutation switched off.
    pub fn frozen(self) -> Self {
        EvolutionParams {
            weight_mutation_prob: 0.0,
            add_connection_prob: 0.0,
            remove_connection_prob: 0.0,
            add_node_prob: 0.0,
            remove_node_prob: 0.0,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("elitism_fraction", self.elitism_fraction),
            ("sexual_fraction", self.sexual_fraction),
            ("weight_mutation_prob", self.weight_mutation_prob),
            ("add_connection_prob", self.add_connection_prob),
            ("remove_connection_prob", self.remove_connection_prob),
            ("add_node_prob", self.add_node_prob),
            ("remove_node_prob", self.remove_node_prob),
        ];
        for (key, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{key} must lie in [0, 1], got {p}")));
            }
        }
        if self.species_count == 0 {
            return Err(Error::Config("species_count must be at least 1".into()));
        }
        if self.population_size < self.species_count {
            return Err(Error::Config(format!(
                "population_size ({}) must be >= species_count ({})",
                self.population_size, self.species_count
            )));
        }
        Ok(())
    }
}
