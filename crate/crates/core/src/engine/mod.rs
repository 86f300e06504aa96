//! Experiment driver: the generation loop over the copy task, transfer
//! seeding, checkpoints and run statistics.
//!
//! Fitness is the training battery score on a fresh battery per genome and
//! generation. A run is solved once a genome reaching the threshold also
//! passes `confirmations` further fresh batteries.

mod checkpoint;
mod config;
mod run;
mod stats;

pub use checkpoint::Checkpoint;
pub use config::{BandChoice, Encoding, ExperimentConfig};
pub use run::{
    build_controller, evolve, initial_population, seed_from_champion, Champion, Evolution, RunOutcome,
    INITIAL_CONNECTION_PROB,
};
pub use stats::{read_stats_csv, write_stats_csv, GenerationStats, RunStats, STATS_HEADER};
