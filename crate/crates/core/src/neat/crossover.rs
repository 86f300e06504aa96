use std::collections::BTreeMap;

use rand::Rng;

use super::Genome;

/// NEAT crossover. Matching innovations take their weight from a random
/// parent; disjoint and excess genes come from the fitter parent (a random
/// one on ties). The offspring therefore has the fitter parent's topology.
pub fn crossover(
    parent_a: &Genome,
    parent_b: &Genome,
    fitness_a: f64,
    fitness_b: f64,
    rng: &mut impl Rng,
) -> Genome {
    let a_leads = if fitness_a == fitness_b {
        rng.random_bool(0.5)
    } else {
        fitness_a > fitness_b
    };
    let (lead, other) = if a_leads {
        (parent_a, parent_b)
    } else {
        (parent_b, parent_a)
    };
    let other_weights: BTreeMap<u64, f64> = other
        .connections()
        .iter()
        .map(|c| (c.innovation, c.weight))
        .collect();
    let connections = lead
        .connections()
        .iter()
        .map(|c| {
            let mut gene = c.clone();
            if let Some(&w) = other_weights.get(&c.innovation) {
                if rng.random_bool(0.5) {
                    gene.weight = w;
                }
            }
            gene
        })
        .collect();
    Genome::from_parts_unchecked(lead.kind(), lead.nodes().to_vec(), connections)
}

#[cfg(test)]
mod tests {
    use super::super::genome::direct_minimal;
    use super::super::ConnectionGene;
    use super::*;
    use crate::rng;

    fn with(conns: &[(u64, u64, u64, f64)]) -> Genome {
        let (kind, nodes, _) = direct_minimal(1).into_parts();
        let conns = conns
            .iter()
            .map(|&(innovation, source, target, weight)| ConnectionGene {
                innovation,
                source,
                target,
                weight,
                enabled: true,
            })
            .collect();
        Genome::from_parts(kind, nodes, conns).unwrap()
    }

    #[test]
    fn self_cross_is_identity() {
        let g = with(&[(0, 0, 5, 1.0), (1, 2, 6, -2.0)]);
        for s in 0..10 {
            assert_eq!(crossover(&g, &g, 0.5, 0.5, &mut rng::stream(s, &[])), g);
        }
    }

    #[test]
    fn fully_disjoint_parents_follow_fitter() {
        let a = with(&[(0, 0, 5, 1.0), (1, 2, 6, -2.0)]);
        let b = with(&[(7, 3, 7, 0.3)]);
        for s in 0..10 {
            let c = crossover(&a, &b, 0.9, 0.1, &mut rng::stream(s, &[]));
            assert_eq!(c.connections(), a.connections());
            let c = crossover(&a, &b, 0.1, 0.9, &mut rng::stream(s, &[]));
            assert_eq!(c.connections(), b.connections());
        }
    }

    #[test]
    fn matching_genes_keep_shared_topology_and_mix_weights() {
        let a = with(&[(0, 0, 5, 1.0), (1, 2, 6, -2.0)]);
        let b = with(&[(0, 0, 5, 3.0), (1, 2, 6, 4.0)]);
        let mut seen = std::collections::BTreeSet::new();
        for s in 0..40 {
            let c = crossover(&a, &b, 0.2, 0.7, &mut rng::stream(s, &[]));
            assert!(c.same_topology(&a));
            seen.insert(c.connections()[0].weight.to_bits());
        }
        assert_eq!(seen.len(), 2);
    }
}
