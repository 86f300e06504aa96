use rand::Rng;

use super::Genome;
use crate::{Error, Result};

/// Weight-difference coefficient in [`genome_distance`].
pub const WEIGHT_DISTANCE_COEFF: f64 = 0.4;
const MAX_ITERATIONS: usize = 10;

/// Non-matching innovation count plus `0.4 * mean |dw|` over matching genes.
pub fn genome_distance(a: &Genome, b: &Genome) -> f64 {
    let (ca, cb) = (a.connections(), b.connections());
    let (mut i, mut j) = (0, 0);
    let (mut mismatched, mut matched, mut dw) = (0usize, 0usize, 0.0);
    while i < ca.len() && j < cb.len() {
        match ca[i].innovation.cmp(&cb[j].innovation) {
            std::cmp::Ordering::Less => {
                mismatched += 1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                mismatched += 1;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                matched += 1;
                dw += (ca[i].weight - cb[j].weight).abs();
                i += 1;
                j += 1;
            }
        }
    }
    mismatched += (ca.len() - i) + (cb.len() - j);
    let mean_dw = if matched == 0 { 0.0 } else { dw / matched as f64 };
    mismatched as f64 + WEIGHT_DISTANCE_COEFF * mean_dw
}

#[derive(Debug, Clone, PartialEq)]
pub struct Speciation {
    /// Species index per genome.
    pub assignment: Vec<usize>,
    /// Member indices per species, ascending; never empty.
    pub members: Vec<Vec<usize>>,
}

impl Speciation {
    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }
}

/// k-medoids clustering into exactly `species_count` non-empty species.
/// Medoids are initialised farthest-first from a random genome and always
/// belong to their own species.
pub fn speciate(
    population: &[Genome],
    species_count: usize,
    rng: &mut impl Rng,
) -> Result<Speciation> {
    let n = population.len();
    if n == 0 {
        return Err(Error::Config("cannot speciate an empty population".into()));
    }
    if species_count == 0 || species_count > n {
        return Err(Error::Config(format!(
            "species_count {species_count} is invalid for a population of {n}"
        )));
    }
    let dist = |a: usize, b: usize| genome_distance(&population[a], &population[b]);

    let mut medoids = vec![rng.random_range(0..n)];
    let mut nearest: Vec<f64> = (0..n).map(|i| dist(i, medoids[0])).collect();
    while medoids.len() < species_count {
        let next = (0..n)
            .filter(|i| !medoids.contains(i))
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if nearest[b] >= nearest[i] => Some(b),
                _ => Some(i),
            })
            .expect("species_count <= population size");
        medoids.push(next);
        for i in 0..n {
            nearest[i] = nearest[i].min(dist(i, next));
        }
    }

    let mut assignment = vec![0; n];
    for _ in 0..MAX_ITERATIONS {
        for (i, slot) in assignment.iter_mut().enumerate() {
            *slot = match medoids.iter().position(|&m| m == i) {
                Some(s) => s,
                None => {
                    let mut best = (0, f64::INFINITY);
                    for (s, &m) in medoids.iter().enumerate() {
                        let d = dist(i, m);
                        if d < best.1 {
                            best = (s, d);
                        }
                    }
                    best.0
                }
            };
        }
        let mut changed = false;
        for (s, medoid) in medoids.iter_mut().enumerate() {
            let members: Vec<usize> = (0..n).filter(|&i| assignment[i] == s).collect();
            let cost = |c: usize| members.iter().map(|&m| dist(c, m)).sum::<f64>();
            let mut best = (*medoid, cost(*medoid));
            for &c in &members {
                let k = cost(c);
                if k < best.1 {
                    best = (c, k);
                }
            }
            if best.0 != *medoid {
                *medoid = best.0;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut members = vec![Vec::new(); species_count];
    for (i, &s) in assignment.iter().enumerate() {
        members[s].push(i);
    }
    Ok(Speciation {
        assignment,
        members,
    })
}
