use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checkpoint::Checkpoint;
use super::config::{Encoding, ExperimentConfig};
use super::stats::{GenerationStats, RunStats};
use crate::copytask::Battery;
use crate::cppn::{locality_seed, minimal_cppn};
use crate::neat::{
    direct_minimal, mutate, reproduce, speciate, ComplexityRegulation, ConnectionGene, EvolutionParams, Genome,
    GenomeKind, InnovationTracker, NodeRole, RegulationMode, WEIGHT_RANGE,
};
use crate::network::Network;
use crate::rng::{self, purpose};
use crate::substrate::{self, build_substrate, Substrate, W_MAX};
use crate::{Error, Result};

/// Probability that each input-to-output link exists in a generation-0 genome.
pub const INITIAL_CONNECTION_PROB: f64 = 0.1;
/// At most this many over-threshold genomes are confirmed per generation.
const CONFIRMATION_CANDIDATES: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Champion {
    pub genome: Genome,
    pub fitness: f64,
    pub generation: usize,
}

/// Everything needed to continue a run from the start of `generation`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct RunState {
    pub generation: usize,
    pub population: Vec<Genome>,
    pub tracker: InnovationTracker,
    pub regulation: ComplexityRegulation,
    pub best: Option<Champion>,
    pub solved: Option<Champion>,
    pub finished: bool,
    pub stats: Vec<GenerationStats>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub champion: Genome,
    pub champion_fitness: f64,
    pub stats: RunStats,
}

/// A generational run that can be stepped, checkpointed and resumed.
pub struct Evolution {
    config: ExperimentConfig,
    substrate: Option<Substrate>,
    state: RunState,
}

impl Evolution {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let mut r = rng::stream(config.master_seed, &[purpose::INIT]);
        let population = initial_population(&config, &mut r)?;
        let tracker = InnovationTracker::for_population(&population);
        let regulation =
            ComplexityRegulation::new(config.params.complexity_threshold, mean_complexity(&population));
        Self::with_state(
            config,
            RunState {
                generation: 0,
                population,
                tracker,
                regulation,
                best: None,
                solved: None,
                finished: false,
                stats: Vec::new(),
            },
        )
    }

    /// Continues the run saved at `path`; the config must hash identically.
    pub fn resume(config: ExperimentConfig, path: &Path) -> Result<Self> {
        config.validate()?;
        let cp = Checkpoint::load(path)?;
        if cp.config_hash != config.hash() {
            return Err(Error::Checkpoint(format!(
                "{} was written by a different configuration (hash {} != {})",
                path.display(),
                cp.config_hash,
                config.hash()
            )));
        }
        if cp.master_seed != config.master_seed {
            return Err(Error::Checkpoint(format!(
                "checkpoint seed {} does not match --seed {}",
                cp.master_seed, config.master_seed
            )));
        }
        let mut state = cp.state;
        // A larger budget reopens a run that stopped on budget alone.
        if state.finished && state.solved.is_none() && state.generation <= config.params.max_generations {
            state.finished = false;
        }
        Self::with_state(config, state)
    }

    fn with_state(config: ExperimentConfig, state: RunState) -> Result<Self> {
        let substrate = if config.encoding.is_indirect() {
            Some(build_substrate(config.bits)?)
        } else {
            None
        };
        Ok(Evolution {
            config,
            substrate,
            state,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    /// Generation that the next [`Evolution::step`] evaluates (one past the
    /// last evaluated generation once the budget is spent).
    pub fn generation(&self) -> usize {
        self.state.generation
    }

    pub fn population(&self) -> &[Genome] {
        &self.state.population
    }

    pub fn stats(&self) -> &[GenerationStats] {
        &self.state.stats
    }

    pub fn best(&self) -> Option<&Champion> {
        self.state.solved.as_ref().or(self.state.best.as_ref())
    }

    pub fn is_finished(&self) -> bool {
        self.state.finished
    }

    pub fn is_solved(&self) -> bool {
        self.state.solved.is_some()
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint::new(&self.config, self.state.clone())
    }

    pub fn save_checkpoint(&self, path: &Path) -> Result<()> {
        self.checkpoint().save(path)
    }

    /// Builds the phenotype of `genome` for this run's bit size.
    pub fn phenotype(&self, genome: &Genome) -> Result<Network> {
        match (genome.kind(), &self.substrate) {
            (GenomeKind::Cppn, Some(s)) => substrate::synthesize(genome, s, W_MAX),
            (GenomeKind::Direct, None) => genome.decode_controller(),
            _ => Err(Error::Contract("genome kind does not match the encoding".into())),
        }
    }

    /// Training score of `genome` on the battery drawn from `seed`.
    /// Genomes that do not decode score 0.
    pub fn evaluate(&self, genome: &Genome, seed: u64) -> f64 {
        let battery = Battery::training().with_band(self.config.band());
        self.phenotype(genome)
            .and_then(|net| battery.evaluate_sequential(&net, self.config.bits, seed))
            .unwrap_or(0.0)
    }

    /// Evaluates the current generation, records its statistics and either
    /// finishes the run or breeds the next generation. Returns the new
    /// statistics row, or `None` if the run had already finished.
    pub fn step(&mut self) -> Result<Option<&GenerationStats>> {
        if self.state.finished {
            return Ok(None);
        }
        let gen = self.state.generation;
        let seed = self.config.master_seed;
        let fitnesses: Vec<f64> = self
            .state
            .population
            .par_iter()
            .enumerate()
            .map(|(i, g)| self.evaluate(g, rng::derive_seed(seed, &[purpose::EVALUATE, gen as u64, i as u64])))
            .collect();

        let pop = &self.state.population;
        let champ = argmax(&fitnesses);
        if self.state.best.as_ref().is_none_or(|b| fitnesses[champ] > b.fitness) {
            self.state.best = Some(Champion {
                genome: pop[champ].clone(),
                fitness: fitnesses[champ],
                generation: gen,
            });
        }
        let solved = self.confirm(&fitnesses, gen);
        let complexity = mean_complexity(pop);
        let mode = self.state.regulation.update(complexity);
        let species_count = self.config.params.species_count.min(pop.len());
        let species = speciate(
            pop,
            species_count,
            &mut rng::stream(seed, &[purpose::SPECIATE, gen as u64]),
        )?;
        self.state.stats.push(GenerationStats {
            generation: gen,
            champion_fitness: fitnesses[champ],
            best_ever: self.state.best.as_ref().map_or(0.0, |b| b.fitness),
            mean_fitness: fitnesses.iter().sum::<f64>() / fitnesses.len() as f64,
            mean_complexity: complexity,
            champion_complexity: pop[champ].complexity(),
            mode,
            species_sizes: species.sizes(),
        });

        if let Some(i) = solved {
            self.state.solved = Some(Champion {
                genome: pop[i].clone(),
                fitness: fitnesses[i],
                generation: gen,
            });
            self.state.finished = true;
        } else {
            // The next generation is bred even when the budget is spent so a
            // checkpoint of the final state can be extended later.
            let next = reproduce(
                pop,
                &fitnesses,
                &species,
                &self.config.params,
                mode,
                &mut self.state.tracker,
                &mut rng::stream(seed, &[purpose::REPRODUCE, gen as u64]),
            )?;
            self.state.population = next.population;
            self.state.generation += 1;
            self.state.finished = gen >= self.config.params.max_generations;
        }
        Ok(self.state.stats.last())
    }

    /// Index of the first over-threshold genome (best first) that also
    /// passes every confirmation battery.
    fn confirm(&self, fitnesses: &[f64], gen: usize) -> Option<usize> {
        let threshold = self.config.solution_threshold;
        let mut candidates: Vec<usize> =
            (0..fitnesses.len()).filter(|&i| fitnesses[i] >= threshold).collect();
        candidates.sort_by(|&a, &b| fitnesses[b].total_cmp(&fitnesses[a]).then(a.cmp(&b)));
        candidates.truncate(CONFIRMATION_CANDIDATES);
        candidates.into_iter().find(|&i| {
            (0..self.config.confirmations).all(|k| {
                let s = rng::derive_seed(
                    self.config.master_seed,
                    &[purpose::CONFIRM, gen as u64, i as u64, k as u64],
                );
                self.evaluate(&self.state.population[i], s) >= threshold
            })
        })
    }

    /// Runs until solved or out of budget.
    pub fn run(mut self) -> Result<RunOutcome> {
        while self.step()?.is_some() {}
        self.into_outcome()
    }

    pub fn into_outcome(self) -> Result<RunOutcome> {
        let state = self.state;
        let champion = state
            .solved
            .clone()
            .or(state.best)
            .ok_or_else(|| Error::Contract("no generation has been evaluated".into()))?;
        Ok(RunOutcome {
            champion: champion.genome,
            champion_fitness: champion.fitness,
            stats: RunStats {
                terminal_generation: state.stats.last().map_or(0, |s| s.generation),
                generations: state.stats,
                solved: state.solved.is_some(),
                solved_generation: state.solved.map(|s| s.generation),
            },
        })
    }
}

/// Copy-task controller for `genome` at `bits`: direct genomes are decoded
/// and must match `bits`, CPPNs are synthesised over the substrate.
pub fn build_controller(genome: &Genome, bits: usize) -> Result<Network> {
    match genome.kind() {
        GenomeKind::Direct => {
            let own = genome.direct_bits()?;
            if own != bits {
                return Err(Error::Contract(format!(
                    "genome is a {own}-bit controller but {bits} bits were requested"
                )));
            }
            genome.decode_controller()
        }
        GenomeKind::Cppn => substrate::synthesize(genome, &build_substrate(bits)?, W_MAX),
    }
}

/// Runs `config` to completion.
pub fn evolve(config: ExperimentConfig) -> Result<(Genome, RunStats)> {
    let outcome = Evolution::new(config)?.run()?;
    Ok((outcome.champion, outcome.stats))
}

fn argmax(xs: &[f64]) -> usize {
    (0..xs.len())
        .max_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(b.cmp(&a)))
        .expect("non-empty population")
}

fn mean_complexity(population: &[Genome]) -> f64 {
    population.iter().map(|g| g.complexity()).sum::<usize>() as f64 / population.len() as f64
}

/// Generation-0 population for the configured encoding.
pub fn initial_population(config: &ExperimentConfig, rng: &mut impl Rng) -> Result<Vec<Genome>> {
    let n = config.params.population_size;
    match config.encoding {
        Encoding::DirectNeat => {
            let template = direct_minimal(config.bits);
            Ok((0..n).map(|_| sparse_minimal(&template, rng)).collect())
        }
        Encoding::Hyperneat => {
            let template = minimal_cppn();
            Ok((0..n).map(|_| sparse_minimal(&template, rng)).collect())
        }
        Encoding::HyperneatSeeded => {
            let seed = locality_seed();
            let mut tracker = InnovationTracker::for_population([&seed]);
            Ok((0..n)
                .map(|_| mutate(&seed, &config.params, RegulationMode::Complexifying, &mut tracker, rng))
                .collect())
        }
        Encoding::HyperneatChampionSeeded => {
            let path = config
                .champion_seed_path
                .as_deref()
                .ok_or_else(|| Error::Config("champion_seed_path is not set".into()))?;
            seed_from_champion(&Genome::load(path)?, &config.params, rng)
        }
    }
}

/// `template` with each input/bias-to-output link present independently
/// with [`INITIAL_CONNECTION_PROB`], weights uniform in the weight range.
fn sparse_minimal(template: &Genome, rng: &mut impl Rng) -> Genome {
    let sources: Vec<u64> = template
        .nodes()
        .iter()
        .filter(|n| matches!(n.role, NodeRole::Input | NodeRole::Bias))
        .map(|n| n.id)
        .collect();
    let targets: Vec<u64> = template
        .nodes()
        .iter()
        .filter(|n| n.role == NodeRole::Output)
        .map(|n| n.id)
        .collect();
    let mut connections = Vec::new();
    for (i, &source) in sources.iter().enumerate() {
        for (k, &target) in targets.iter().enumerate() {
            if rng.random_bool(INITIAL_CONNECTION_PROB) {
                connections.push(ConnectionGene {
                    innovation: (i * targets.len() + k) as u64,
                    source,
                    target,
                    weight: rng.random_range(-WEIGHT_RANGE..=WEIGHT_RANGE),
                    enabled: true,
                });
            }
        }
    }
    Genome::from_parts(template.kind(), template.nodes().to_vec(), connections)
        .expect("minimal genome with input-to-output links is valid")
}

/// One exact copy of `champion` followed by `population_size - 1` clones
/// mutated once each.
pub fn seed_from_champion(
    champion: &Genome,
    params: &EvolutionParams,
    rng: &mut impl Rng,
) -> Result<Vec<Genome>> {
    if champion.kind() != GenomeKind::Cppn {
        return Err(Error::InvalidGenome(
            "transfer seeding requires a CPPN champion".into(),
        ));
    }
    champion.validate()?;
    let mut tracker = InnovationTracker::for_population([champion]);
    let mut population = vec![champion.clone()];
    population.extend((1..params.population_size).map(|_| {
        mutate(champion, params, RegulationMode::Complexifying, &mut tracker, rng)
    }));
    Ok(population)
}
