use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::neat::RegulationMode;
use crate::{Error, Result};

/// One evaluated generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub champion_fitness: f64,
    pub best_ever: f64,
    pub mean_fitness: f64,
    pub mean_complexity: f64,
    pub champion_complexity: usize,
    /// Mode used to breed the following generation.
    pub mode: RegulationMode,
    pub species_sizes: Vec<usize>,
}

pub const STATS_HEADER: [&str; 8] = [
    "generation",
    "champion_fitness",
    "best_ever",
    "mean_fitness",
    "mean_complexity",
    "champion_complexity",
    "mode",
    "species_sizes",
];

impl GenerationStats {
    pub fn csv_record(&self) -> [String; 8] {
        [
            self.generation.to_string(),
            self.champion_fitness.to_string(),
            self.best_ever.to_string(),
            self.mean_fitness.to_string(),
            self.mean_complexity.to_string(),
            self.champion_complexity.to_string(),
            match self.mode {
                RegulationMode::Complexifying => "complexifying",
                RegulationMode::Simplifying => "simplifying",
            }
            .to_string(),
            self.species_sizes
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(";"),
        ]
    }

    fn from_record(rec: &csv::StringRecord) -> Result<Self> {
        let bad = |what: &str| Error::Config(format!("stats CSV: bad {what} in row {rec:?}"));
        let field = |i: usize| rec.get(i).ok_or_else(|| bad(STATS_HEADER[i]));
        let num = |i: usize| -> Result<f64> { field(i)?.parse().map_err(|_| bad(STATS_HEADER[i])) };
        let int = |i: usize| -> Result<usize> { field(i)?.parse().map_err(|_| bad(STATS_HEADER[i])) };
        let mode = match field(6)? {
            "complexifying" => RegulationMode::Complexifying,
            "simplifying" => RegulationMode::Simplifying,
            _ => return Err(bad("mode")),
        };
        let sizes = field(7)?;
        let species_sizes = if sizes.is_empty() {
            Vec::new()
        } else {
            sizes
                .split(';')
                .map(|s| s.parse().map_err(|_| bad("species_sizes")))
                .collect::<Result<_>>()?
        };
        Ok(GenerationStats {
            generation: int(0)?,
            champion_fitness: num(1)?,
            best_ever: num(2)?,
            mean_fitness: num(3)?,
            mean_complexity: num(4)?,
            champion_complexity: int(5)?,
            mode,
            species_sizes,
        })
    }
}

/// Per-generation history of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub generations: Vec<GenerationStats>,
    pub terminal_generation: usize,
    pub solved: bool,
    pub solved_generation: Option<usize>,
}

impl RunStats {
    pub fn champion_series(&self) -> Vec<f64> {
        self.generations.iter().map(|g| g.champion_fitness).collect()
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        write_stats_csv(&self.generations, out)
    }
}

pub fn write_stats_csv(rows: &[GenerationStats], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(STATS_HEADER)?;
    for r in rows {
        w.write_record(r.csv_record())?;
    }
    w.flush().map_err(|e| Error::io("<stats csv>", e))
}

/// Reads a stats CSV; an empty file or one without rows is an error.
pub fn read_stats_csv(input: impl Read) -> Result<Vec<GenerationStats>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(STATS_HEADER) {
        return Err(Error::Config("not a run statistics CSV".into()));
    }
    let rows = r
        .records()
        .map(|rec| GenerationStats::from_record(&rec?))
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(Error::Config("statistics CSV has no generations".into()));
    }
    Ok(rows)
}
