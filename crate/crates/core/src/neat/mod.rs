//! Direct-encoding NEAT shared by controllers and CPPNs.

mod crossover;
mod genome;
mod innovation;
mod mutation;
mod params;
mod regulation;
mod reproduction;
mod species;

pub use crossover::crossover;
pub use genome::{ConnectionGene, Genome, GenomeKind, NodeGene, NodeRole};
pub use innovation::InnovationTracker;
pub use mutation::{mutate, WEIGHT_PERTURB_PROB, WEIGHT_RANGE, WEIGHT_SIGMA};
pub use params::EvolutionParams;
pub use regulation::{ComplexityRegulation, RegulationMode};
pub(crate) use genome::direct_minimal;
pub use reproduction::{allocate, elite_count, next_generation, reproduce, Generation};
pub use species::{genome_distance, speciate, Speciation, WEIGHT_DISTANCE_COEFF};
