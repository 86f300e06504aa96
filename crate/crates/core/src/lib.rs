//! Evolvable Neural Turing Machines for the bit-vector copy task.
//!
//! Controllers are evolved either directly (NEAT genomes decoded into
//! feed-forward networks) or indirectly (CPPN genomes queried over a
//! geometric substrate, HyperNEAT style). Controllers drive a growable
//! memory tape with a single combined read/write head.
//!
//! Module map:
//! - [`neat`]: genomes, mutation, crossover, speciation, complexity regulation.
//! - [`cppn`]: activation palette, CPPN queries, the locality seed.
//! - [`substrate`]: copy-task node layout and phenotype synthesis.
//! - [`network`]: the executable phenotype shared by both encodings.
//! - [`entm`]: the memory tape and its per-timestep head cycle.
//! - [`copytask`]: episodes, fitness, test batteries, activity recordings.
//! - [`engine`]: the generational driver, transfer seeding, checkpoints.
//! - [`cli`]: command-line front end (used by the `hyperentm` binary).

pub mod cli;
pub mod copytask;
pub mod cppn;
pub mod engine;
pub mod entm;
mod error;
pub mod neat;
pub mod network;
pub mod rng;
pub mod substrate;

pub use error::{Error, Result};
