use rand::Rng;

use super::{crossover, mutate, speciate, EvolutionParams, Genome, InnovationTracker, Speciation};
use super::RegulationMode;
use crate::{Error, Result};

/// Share of each species (by rank) eligible as parents.
const PARENT_POOL_FRACTION: f64 = 0.2;

#[derive(Debug, Clone)]
pub struct Generation {
    pub population: Vec<Genome>,
    /// Species sizes of the parent population.
    pub species_sizes: Vec<usize>,
    pub elites: usize,
}

/// `round(size * fraction)`, at least one when elitism is on.
pub fn elite_count(population_size: usize, fraction: f64) -> usize {
    if fraction <= 0.0 || population_size == 0 {
        return 0;
    }
    ((population_size as f64 * fraction).round() as usize).clamp(1, population_size)
}

/// Splits `total` proportionally to `weights` by largest remainder (ties to
/// the lower index). Non-positive weight sums fall back to an even split.
pub fn allocate(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().map(|w| w.max(0.0)).sum();
    let weights: Vec<f64> = if sum > 0.0 {
        weights.iter().map(|w| w.max(0.0) / sum).collect()
    } else {
        vec![1.0 / weights.len() as f64; weights.len()]
    };
    let quotas: Vec<f64> = weights.iter().map(|w| w * total as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let (fa, fb) = (quotas[a] - quotas[a].floor(), quotas[b] - quotas[b].floor());
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

fn ranked(members: &[usize], fitnesses: &[f64]) -> Vec<usize> {
    let mut r = members.to_vec();
    r.sort_by(|&a, &b| fitnesses[b].total_cmp(&fitnesses[a]).then(a.cmp(&b)));
    r
}

/// Speciates `population` and breeds the next generation from it.
pub fn next_generation(
    population: &[Genome],
    fitnesses: &[f64],
    params: &EvolutionParams,
    mode: RegulationMode,
    tracker: &mut InnovationTracker,
    rng: &mut impl Rng,
) -> Result<Generation> {
    if population.is_empty() {
        return Err(Error::Config("cannot reproduce an empty population".into()));
    }
    let species = speciate(population, params.species_count.min(population.len()), rng)?;
    reproduce(population, fitnesses, &species, params, mode, tracker, rng)
}

/// Produces the next population from an existing speciation: per-species
/// elites are copied unchanged, the remaining offspring are shared among
/// species in proportion to mean species fitness and bred by crossover +
/// mutation or mutation alone.
pub fn reproduce(
    population: &[Genome],
    fitnesses: &[f64],
    species: &Speciation,
    params: &EvolutionParams,
    mode: RegulationMode,
    tracker: &mut InnovationTracker,
    rng: &mut impl Rng,
) -> Result<Generation> {
    if population.len() != fitnesses.len() || species.assignment.len() != population.len() {
        return Err(Error::Contract(format!(
            "{} genomes, {} fitness values, {} species assignments",
            population.len(),
            fitnesses.len(),
            species.assignment.len()
        )));
    }
    let size = population.len();
    tracker.new_generation();
    let sizes = species.sizes();

    let champion = (0..size)
        .max_by(|&a, &b| fitnesses[a].total_cmp(&fitnesses[b]).then(b.cmp(&a)))
        .expect("non-empty population");
    let elites_total = elite_count(size, params.elitism_fraction);
    let mut elites = allocate(
        elites_total,
        &sizes.iter().map(|&s| s as f64).collect::<Vec<_>>(),
    );
    let champ_species = species.assignment[champion];
    if elites_total > 0 && elites[champ_species] == 0 {
        let donor = (0..elites.len())
            .max_by(|&a, &b| elites[a].cmp(&elites[b]).then(b.cmp(&a)))
            .expect("at least one species");
        elites[donor] -= 1;
        elites[champ_species] = 1;
    }

    let means: Vec<f64> = species
        .members
        .iter()
        .map(|m| m.iter().map(|&i| fitnesses[i]).sum::<f64>() / m.len() as f64)
        .collect();
    let all_equal = means.windows(2).all(|w| w[0] == w[1]);
    let weights: Vec<f64> = if all_equal {
        sizes.iter().map(|&s| s as f64).collect()
    } else {
        means
    };
    let offspring = allocate(size - elites_total, &weights);

    let mut next = Vec::with_capacity(size);
    for (s, members) in species.members.iter().enumerate() {
        let ranked = ranked(members, fitnesses);
        next.extend(ranked.iter().take(elites[s]).map(|&i| population[i].clone()));
        let pool_len = ((ranked.len() as f64 * PARENT_POOL_FRACTION).ceil() as usize).max(1);
        let pool = &ranked[..pool_len];
        for _ in 0..offspring[s] {
            let first = pool[rng.random_range(0..pool.len())];
            let child = if pool.len() >= 2 && rng.random_bool(params.sexual_fraction) {
                let mut second = pool[rng.random_range(0..pool.len() - 1)];
                if second == first {
                    second = pool[pool.len() - 1];
                }
                crossover(
                    &population[first],
                    &population[second],
                    fitnesses[first],
                    fitnesses[second],
                    rng,
                )
            } else {
                population[first].clone()
            };
            next.push(mutate(&child, params, mode, tracker, rng));
        }
    }
    debug_assert_eq!(next.len(), size);
    Ok(Generation {
        population: next,
        species_sizes: sizes,
        elites: elites_total,
    })
}

#[cfg(test)]
mod tests {
    use super::super::genome::direct_minimal;
    use super::*;
    use crate::rng;

    #[test]
    fn paper_population_has_ten_elites() {
        assert_eq!(elite_count(500, 0.02), 10);
        assert_eq!(elite_count(1, 0.02), 1);
        assert_eq!(elite_count(10, 0.0), 0);
    }

    #[test]
    fn allocation_is_exact_and_proportional() {
        assert_eq!(allocate(10, &[1.0, 1.0]), vec![5, 5]);
        assert_eq!(allocate(10, &[3.0, 1.0]), vec![8, 2]);
        assert_eq!(allocate(7, &[0.0, 0.0, 0.0]), vec![3, 2, 2]);
        let sizes = [13.0, 7.0, 30.0];
        let a = allocate(490, &sizes);
        assert_eq!(a.iter().sum::<usize>(), 490);
        for (n, s) in a.iter().zip(sizes) {
            assert!((*n as f64 - 490.0 * s / 50.0).abs() <= 1.0);
        }
    }

    #[test]
    fn single_genome_champion_survives() {
        let g = direct_minimal(1);
        let params = EvolutionParams {
            population_size: 1,
            species_count: 1,
            ..EvolutionParams::neat()
        };
        let mut t = InnovationTracker::for_population([&g]);
        let next = next_generation(
            &[g.clone()],
            &[0.3],
            &params,
            RegulationMode::Complexifying,
            &mut t,
            &mut rng::stream(0, &[]),
        )
        .unwrap();
        assert_eq!(next.population, vec![g]);
    }

    #[test]
    fn mismatched_fitness_length_is_rejected() {
        let g = direct_minimal(1);
        let mut t = InnovationTracker::for_population([&g]);
        let r = next_generation(
            &[g.clone(), g],
            &[0.3],
            &EvolutionParams::neat(),
            RegulationMode::Complexifying,
            &mut t,
            &mut rng::stream(0, &[]),
        );
        assert!(matches!(r, Err(Error::Contract(_))));
    }
}
