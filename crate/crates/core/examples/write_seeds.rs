//! Writes the locality seed and the hand-built aligned copy CPPN as genome
//! files: `cargo run --example write_seeds -- <dir>`.

use hyperentm::cppn::{aligned_copy_cppn, locality_seed};
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&dir)?;
    locality_seed().save(&dir.join("locality_seed.json"))?;
    aligned_copy_cppn().save(&dir.join("aligned_copy.json"))?;
    println!("wrote {}/{{locality_seed,aligned_copy}}.json", dir.display());
    Ok(())
}
