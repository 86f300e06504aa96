use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{ConnectionGene, Genome, GenomeKind, InnovationTracker, NodeGene, NodeRole};
use super::{EvolutionParams, RegulationMode};
use crate::cppn::{Activation, HIDDEN_PALETTE};

/// Weights live in `[-WEIGHT_RANGE, WEIGHT_RANGE]`.
pub const WEIGHT_RANGE: f64 = 5.0;
/// Per-connection share of perturbations within a weight pass; the rest are resets.
pub const WEIGHT_PERTURB_PROB: f64 = 0.9;
pub const WEIGHT_SIGMA: f64 = 0.5;

/// Applies each mutation kind independently with its configured
/// probability. Mutations that cannot apply are skipped. While
/// `mode` is simplifying, additive structural mutations are off.
pub fn mutate(
    genome: &Genome,
    params: &EvolutionParams,
    mode: RegulationMode,
    tracker: &mut InnovationTracker,
    rng: &mut impl Rng,
) -> Genome {
    let mut g = genome.clone();
    let additive = mode == RegulationMode::Complexifying;
    if rng.random_bool(params.weight_mutation_prob) {
        mutate_weights(&mut g, rng);
    }
    if additive && rng.random_bool(params.add_connection_prob) {
        g = add_connection(g, tracker, rng);
    }
    if additive && rng.random_bool(params.add_node_prob) {
        g = add_node(g, tracker, rng);
    }
    if rng.random_bool(params.remove_connection_prob) {
        g = remove_connection(g, rng);
    }
    if rng.random_bool(params.remove_node_prob) {
        g = remove_node(g, rng);
    }
    g
}

pub(crate) fn random_weight(rng: &mut impl Rng) -> f64 {
    rng.random_range(-WEIGHT_RANGE..=WEIGHT_RANGE)
}

fn mutate_weights(g: &mut Genome, rng: &mut impl Rng) {
    let normal = Normal::new(0.0, WEIGHT_SIGMA).expect("valid sigma");
    for c in g.connections_mut() {
        if rng.random_bool(WEIGHT_PERTURB_PROB) {
            c.weight = (c.weight + normal.sample(rng)).clamp(-WEIGHT_RANGE, WEIGHT_RANGE);
        } else {
            c.weight = random_weight(rng);
        }
    }
}

fn add_connection(g: Genome, tracker: &mut InnovationTracker, rng: &mut impl Rng) -> Genome {
    let sources: Vec<u64> = g
        .nodes()
        .iter()
        .filter(|n| n.role != NodeRole::Output)
        .map(|n| n.id)
        .collect();
    let targets: Vec<u64> = g
        .nodes()
        .iter()
        .filter(|n| matches!(n.role, NodeRole::Output | NodeRole::Hidden))
        .map(|n| n.id)
        .collect();
    let mut candidates = Vec::new();
    for &s in &sources {
        for &t in &targets {
            if s != t && !g.has_connection(s, t) && !g.reaches(t, s) {
                candidates.push((s, t));
            }
        }
    }
    let Some(&(source, target)) = candidates.choose(rng) else {
        return g;
    };
    let weight = random_weight(rng);
    let innovation = tracker.connection(source, target);
    if g.connections().iter().any(|c| c.innovation == innovation) {
        return g;
    }
    let (kind, nodes, mut conns) = g.into_parts();
    let at = conns.partition_point(|c| c.innovation < innovation);
    conns.insert(
        at,
        ConnectionGene {
            innovation,
            source,
            target,
            weight,
            enabled: true,
        },
    );
    Genome::from_parts_unchecked(kind, nodes, conns)
}

/// Splits an enabled connection `s -> t` into `s -> new` (weight 1) and
/// `new -> t` (old weight); the original gene is disabled.
fn add_node(g: Genome, tracker: &mut InnovationTracker, rng: &mut impl Rng) -> Genome {
    let enabled: Vec<usize> = (0..g.connections().len())
        .filter(|&i| g.connections()[i].enabled)
        .collect();
    let Some(&pick) = enabled.choose(rng) else {
        return g;
    };
    let old = g.connections()[pick].clone();
    let activation = match g.kind() {
        GenomeKind::Cppn => *HIDDEN_PALETTE.choose(rng).expect("non-empty palette"),
        GenomeKind::Direct => Activation::Logistic,
    };
    let ids = tracker.split(old.innovation, &g);
    let (kind, mut nodes, mut conns) = g.into_parts();
    conns[pick].enabled = false;
    nodes.push(NodeGene {
        id: ids.node,
        role: NodeRole::Hidden,
        activation,
    });
    nodes.sort_by_key(|n| n.id);
    conns.push(ConnectionGene {
        innovation: ids.incoming,
        source: old.source,
        target: ids.node,
        weight: 1.0,
        enabled: true,
    });
    conns.push(ConnectionGene {
        innovation: ids.outgoing,
        source: ids.node,
        target: old.target,
        weight: old.weight,
        enabled: true,
    });
    conns.sort_by_key(|c| c.innovation);
    Genome::from_parts_unchecked(kind, nodes, conns)
}

fn remove_connection(g: Genome, rng: &mut impl Rng) -> Genome {
    if g.connections().is_empty() {
        return g;
    }
    let pick = rng.random_range(0..g.connections().len());
    let (kind, nodes, mut conns) = g.into_parts();
    conns.remove(pick);
    prune_isolated(kind, nodes, conns)
}

fn remove_node(g: Genome, rng: &mut impl Rng) -> Genome {
    let hidden: Vec<u64> = g
        .nodes()
        .iter()
        .filter(|n| n.role == NodeRole::Hidden)
        .map(|n| n.id)
        .collect();
    let Some(&victim) = hidden.choose(rng) else {
        return g;
    };
    let (kind, mut nodes, mut conns) = g.into_parts();
    nodes.retain(|n| n.id != victim);
    conns.retain(|c| c.source != victim && c.target != victim);
    Genome::from_parts_unchecked(kind, nodes, conns)
}

/// Drops hidden nodes left without any connection.
fn prune_isolated(kind: GenomeKind, mut nodes: Vec<NodeGene>, conns: Vec<ConnectionGene>) -> Genome {
    nodes.retain(|n| {
        n.role != NodeRole::Hidden
            || conns.iter().any(|c| c.source == n.id || c.target == n.id)
    });
    Genome::from_parts_unchecked(kind, nodes, conns)
}

#[cfg(test)]
mod tests {
    use super::super::genome::direct_minimal;
    use super::*;
    use crate::rng;

    fn only(f: impl FnOnce(&mut EvolutionParams)) -> EvolutionParams {
        let mut p = EvolutionParams::neat().frozen();
        f(&mut p);
        p
    }

    fn one_connection() -> Genome {
        let (kind, nodes, _) = direct_minimal(1).into_parts();
        Genome::from_parts(
            kind,
            nodes,
            vec![ConnectionGene {
                innovation: 0,
                source: 2,
                target: 6,
                weight: 0.75,
                enabled: true,
            }],
        )
        .unwrap()
    }

    #[test]
    fn remove_connection_on_empty_genome_is_a_noop() {
        let g = direct_minimal(1);
        let mut t = InnovationTracker::for_population([&g]);
        let p = only(|p| p.remove_connection_prob = 1.0);
        let m = mutate(&g, &p, RegulationMode::Complexifying, &mut t, &mut rng::stream(1, &[]));
        assert_eq!(m, g);
    }

    #[test]
    fn zero_probabilities_leave_genome_identical() {
        let g = one_connection();
        let mut t = InnovationTracker::for_population([&g]);
        let p = EvolutionParams::neat().frozen();
        for s in 0..20 {
            let m = mutate(&g, &p, RegulationMode::Complexifying, &mut t, &mut rng::stream(s, &[]));
            assert_eq!(m.to_json(), g.to_json());
        }
    }

    #[test]
    fn add_node_splits_the_only_connection() {
        let g = one_connection();
        let mut t = InnovationTracker::for_population([&g]);
        let p = only(|p| p.add_node_prob = 1.0);
        let m = mutate(&g, &p, RegulationMode::Complexifying, &mut t, &mut rng::stream(3, &[]));
        assert_eq!(m.count_role(NodeRole::Hidden), 1);
        assert_eq!(m.connections().len(), 3);
        let hidden = m.nodes().iter().find(|n| n.role == NodeRole::Hidden).unwrap().id;
        let orig = &m.connections()[0];
        assert!(!orig.enabled);
        let into = m.connections().iter().find(|c| c.target == hidden).unwrap();
        let out = m.connections().iter().find(|c| c.source == hidden).unwrap();
        assert_eq!((into.source, into.weight), (2, 1.0));
        assert_eq!((out.target, out.weight), (6, 0.75));
        m.validate().unwrap();
    }

    #[test]
    fn simplifying_mode_blocks_additions() {
        let g = one_connection();
        let mut t = InnovationTracker::for_population([&g]);
        let p = only(|p| {
            p.add_node_prob = 1.0;
            p.add_connection_prob = 1.0;
        });
        let m = mutate(&g, &p, RegulationMode::Simplifying, &mut t, &mut rng::stream(3, &[]));
        assert_eq!(m, g);
    }

    #[test]
    fn same_split_in_one_generation_shares_ids() {
        let g = one_connection();
        let mut t = InnovationTracker::for_population([&g]);
        let p = only(|p| p.add_node_prob = 1.0);
        let a = mutate(&g, &p, RegulationMode::Complexifying, &mut t, &mut rng::stream(1, &[]));
        let b = mutate(&g, &p, RegulationMode::Complexifying, &mut t, &mut rng::stream(2, &[]));
        assert!(a.same_topology(&b));
        t.new_generation();
        let c = mutate(&g, &p, RegulationMode::Complexifying, &mut t, &mut rng::stream(1, &[]));
        assert!(!a.same_topology(&c));
    }

    #[test]
    fn same_added_connection_shares_innovation() {
        // Only one candidate pair remains once the first is taken, so both
        // genomes are forced onto it.
        let g = direct_minimal(1);
        let mut t = InnovationTracker::for_population([&g]);
        t.connection(0, 5);
        let i = t.connection(0, 5);
        assert_eq!(i, t.connection(0, 5));
        assert_ne!(i, t.connection(1, 5));
    }
}
