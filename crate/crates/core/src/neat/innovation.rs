use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Genome;

/// Ids handed out when a connection is split by add-node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct SplitIds {
    pub node: u64,
    pub incoming: u64,
    pub outgoing: u64,
}

/// Historical markings. Identical structural mutations within one
/// generation receive identical ids; the lookup tables are cleared by
/// [`InnovationTracker::new_generation`], the counters never go back.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InnovationTracker {
    next_innovation: u64,
    next_node: u64,
    #[serde(skip)]
    added: HashMap<(u64, u64), u64>,
    #[serde(skip)]
    splits: HashMap<u64, SplitIds>,
}

impl InnovationTracker {
    pub fn new(next_innovation: u64, next_node: u64) -> Self {
        InnovationTracker {
            next_innovation,
            next_node,
            added: HashMap::new(),
            splits: HashMap::new(),
        }
    }

    /// Starts counters above every id already present in `population`.
    pub fn for_population<'a>(population: impl IntoIterator<Item = &'a Genome>) -> Self {
        let (mut innov, mut node) = (0, 0);
        for g in population {
            innov = innov.max(g.max_innovation().map_or(0, |i| i + 1));
            node = node.max(g.max_node_id() + 1);
        }
        Self::new(innov, node)
    }

    pub fn new_generation(&mut self) {
        self.added.clear();
        self.splits.clear();
    }

    pub fn next_innovation(&self) -> u64 {
        self.next_innovation
    }

    pub fn next_node(&self) -> u64 {
        self.next_node
    }

    fn fresh_innovation(&mut self) -> u64 {
        self.next_innovation += 1;
        self.next_innovation - 1
    }

    pub(crate) fn connection(&mut self, source: u64, target: u64) -> u64 {
        if let Some(&i) = self.added.get(&(source, target)) {
            return i;
        }
        let i = self.fresh_innovation();
        self.added.insert((source, target), i);
        i
    }

    /// Ids for splitting connection `innovation`. Falls back to fresh ids
    /// when the recorded ones already occur in `genome`.
    pub(crate) fn split(&mut self, innovation: u64, genome: &Genome) -> SplitIds {
        if let Some(&ids) = self.splits.get(&innovation) {
            let clash = genome.node(ids.node).is_some()
                || genome
                    .connections()
                    .iter()
                    .any(|c| c.innovation == ids.incoming || c.innovation == ids.outgoing);
            if !clash {
                return ids;
            }
            return self.fresh_split();
        }
        let ids = self.fresh_split();
        self.splits.insert(innovation, ids);
        ids
    }

    fn fresh_split(&mut self) -> SplitIds {
        let node = self.next_node;
        self.next_node += 1;
        SplitIds {
            node,
            incoming: self.fresh_innovation(),
            outgoing: self.fresh_innovation(),
        }
    }

    /// Keeps counters ahead of ids introduced from outside (seeds, files).
    pub fn observe(&mut self, genome: &Genome) {
        self.next_innovation = self
            .next_innovation
            .max(genome.max_innovation().map_or(0, |i| i + 1));
        self.next_node = self.next_node.max(genome.max_node_id() + 1);
    }
}
