use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cppn::Activation;
use crate::network::{Network, NetworkBuilder, NodeTag};
use crate::substrate;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeRole {
    Input,
    Bias,
    Output,
    Hidden,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenomeKind {
    /// Decodes directly into a copy-task controller.
    Direct,
    /// Queried over a substrate to produce a controller.
    Cppn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeGene {
    pub id: u64,
    pub role: NodeRole,
    pub activation: Activation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionGene {
    pub innovation: u64,
    pub source: u64,
    pub target: u64,
    #[serde(with = "exact_weight")]
    pub weight: f64,
    pub enabled: bool,
}

/// Weights travel as 17-significant-digit decimal strings so that a JSON
/// round trip reproduces every bit.
mod exact_weight {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{w:.16e}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let text = String::deserialize(d)?;
        let w: f64 = text.parse().map_err(D::Error::custom)?;
        if !w.is_finite() {
            return Err(D::Error::custom(format!("non-finite weight {text}")));
        }
        Ok(w)
    }
}

/// Node and connection genes. Nodes are kept sorted by id, connections by
/// innovation number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "GenomeFile", try_from = "GenomeFile")]
pub struct Genome {
    kind: GenomeKind,
    nodes: Vec<NodeGene>,
    connections: Vec<ConnectionGene>,
}

pub const CPPN_OUTPUT_NAMES: [&str; 3] = ["weight", "leo", "bias"];
const FORMAT_TAG: &str = "hyperentm-genome";
const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenomeFile {
    format: String,
    version: u32,
    kind: GenomeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outputs: Option<Vec<String>>,
    nodes: Vec<NodeGene>,
    connections: Vec<ConnectionGene>,
}

impl From<Genome> for GenomeFile {
    fn from(g: Genome) -> Self {
        GenomeFile {
            format: FORMAT_TAG.into(),
            version: FORMAT_VERSION,
            kind: g.kind,
            outputs: (g.kind == GenomeKind::Cppn)
                .then(|| CPPN_OUTPUT_NAMES.iter().map(|s| s.to_string()).collect()),
            nodes: g.nodes,
            connections: g.connections,
        }
    }
}

impl TryFrom<GenomeFile> for Genome {
    type Error = Error;

    fn try_from(file: GenomeFile) -> Result<Self> {
        if file.format != FORMAT_TAG || file.version != FORMAT_VERSION {
            return Err(Error::InvalidGenome(format!(
                "unsupported genome format {} v{}",
                file.format, file.version
            )));
        }
        if file.kind == GenomeKind::Cppn {
            let names = file.outputs.unwrap_or_default();
            if names != CPPN_OUTPUT_NAMES {
                return Err(Error::InvalidGenome(format!(
                    "CPPN header must name outputs {CPPN_OUTPUT_NAMES:?}, found {names:?}"
                )));
            }
        }
        Genome::from_parts(file.kind, file.nodes, file.connections)
    }
}

impl Genome {
    /// Inputs get ids `0..inputs`, the bias node `inputs`, outputs follow.
    pub fn minimal(kind: GenomeKind, inputs: usize, output_activations: &[Activation]) -> Self {
        let mut nodes: Vec<NodeGene> = (0..inputs as u64)
            .map(|id| NodeGene {
                id,
                role: NodeRole::Input,
                activation: Activation::Linear,
            })
            .collect();
        nodes.push(NodeGene {
            id: inputs as u64,
            role: NodeRole::Bias,
            activation: Activation::Linear,
        });
        for (k, &activation) in output_activations.iter().enumerate() {
            nodes.push(NodeGene {
                id: (inputs + 1 + k) as u64,
                role: NodeRole::Output,
                activation,
            });
        }
        Genome {
            kind,
            nodes,
            connections: Vec::new(),
        }
    }

    /// Builds a genome from parts, sorting and validating them.
    pub fn from_parts(
        kind: GenomeKind,
        mut nodes: Vec<NodeGene>,
        mut connections: Vec<ConnectionGene>,
    ) -> Result<Self> {
        nodes.sort_by_key(|n| n.id);
        connections.sort_by_key(|c| c.innovation);
        let genome = Genome {
            kind,
            nodes,
            connections,
        };
        genome.validate()?;
        Ok(genome)
    }

    /// Skips validation; callers inside the crate keep the invariants.
    pub(crate) fn from_parts_unchecked(
        kind: GenomeKind,
        nodes: Vec<NodeGene>,
        connections: Vec<ConnectionGene>,
    ) -> Self {
        debug_assert!(nodes.windows(2).all(|w| w[0].id < w[1].id));
        debug_assert!(connections
            .windows(2)
            .all(|w| w[0].innovation < w[1].innovation));
        Genome {
            kind,
            nodes,
            connections,
        }
    }

    pub fn kind(&self) -> GenomeKind {
        self.kind
    }

    pub fn nodes(&self) -> &[NodeGene] {
        &self.nodes
    }

    pub fn connections(&self) -> &[ConnectionGene] {
        &self.connections
    }

    pub(crate) fn connections_mut(&mut self) -> &mut [ConnectionGene] {
        &mut self.connections
    }

    pub(crate) fn into_parts(self) -> (GenomeKind, Vec<NodeGene>, Vec<ConnectionGene>) {
        (self.kind, self.nodes, self.connections)
    }

    pub fn node(&self, id: u64) -> Option<&NodeGene> {
        self.nodes
            .binary_search_by_key(&id, |n| n.id)
            .ok()
            .map(|i| &self.nodes[i])
    }

    pub fn count_role(&self, role: NodeRole) -> usize {
        self.nodes.iter().filter(|n| n.role == role).count()
    }

    pub fn input_count(&self) -> usize {
        self.count_role(NodeRole::Input)
    }

    pub fn output_count(&self) -> usize {
        self.count_role(NodeRole::Output)
    }

    /// Number of connection genes.
    pub fn complexity(&self) -> usize {
        self.connections.len()
    }

    pub fn max_node_id(&self) -> u64 {
        self.nodes.last().map_or(0, |n| n.id)
    }

    pub fn max_innovation(&self) -> Option<u64> {
        self.connections.last().map(|c| c.innovation)
    }

    pub fn has_connection(&self, source: u64, target: u64) -> bool {
        self.connections
            .iter()
            .any(|c| c.source == source && c.target == target)
    }

    /// True if `to` is reachable from `from` along connection genes.
    pub(crate) fn reaches(&self, from: u64, to: u64) -> bool {
        if from == to {
            return true;
        }
        let mut seen = HashSet::new();
        let mut stack = vec![from];
        while let Some(n) = stack.pop() {
            for c in self.connections.iter().filter(|c| c.source == n) {
                if c.target == to {
                    return true;
                }
                if seen.insert(c.target) {
                    stack.push(c.target);
                }
            }
        }
        false
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGenome(m));
        let mut roles = BTreeMap::new();
        for n in &self.nodes {
            if roles.insert(n.id, n.role).is_some() {
                return bad(format!("duplicate node id {}", n.id));
            }
        }
        if self.count_role(NodeRole::Bias) != 1 {
            return bad("genome must contain exactly one bias node".into());
        }
        if self.input_count() == 0 || self.output_count() == 0 {
            return bad("genome needs at least one input and one output".into());
        }
        let mut pairs = HashSet::new();
        let mut innovations = BTreeSet::new();
        for c in &self.connections {
            let (Some(_), Some(&tr)) = (roles.get(&c.source), roles.get(&c.target)) else {
                return bad(format!(
                    "connection {} references a missing node ({} -> {})",
                    c.innovation, c.source, c.target
                ));
            };
            if matches!(tr, NodeRole::Input | NodeRole::Bias) {
                return bad(format!("connection {} targets an input", c.innovation));
            }
            if !pairs.insert((c.source, c.target)) {
                return bad(format!(
                    "duplicate connection {} -> {}",
                    c.source, c.target
                ));
            }
            if !innovations.insert(c.innovation) {
                return bad(format!("duplicate innovation {}", c.innovation));
            }
            if !c.weight.is_finite() {
                return bad(format!("connection {} has a non-finite weight", c.innovation));
            }
        }
        if self.has_cycle() {
            return bad("cycle detected in genome graph".into());
        }
        match self.kind {
            GenomeKind::Cppn => {
                if self.input_count() != 6 || self.output_count() != 3 {
                    return bad(format!(
                        "a CPPN needs 6 coordinate inputs and 3 outputs, found {} and {}",
                        self.input_count(),
                        self.output_count()
                    ));
                }
                let acts: Vec<_> = self
                    .nodes
                    .iter()
                    .filter(|n| n.role == NodeRole::Output)
                    .map(|n| n.activation)
                    .collect();
                if acts != crate::cppn::OUTPUT_ACTIVATIONS {
                    return bad("CPPN outputs must be (linear, step, linear)".into());
                }
            }
            GenomeKind::Direct => {
                self.direct_bits()?;
            }
        }
        Ok(())
    }

    fn has_cycle(&self) -> bool {
        let mut indegree: BTreeMap<u64, usize> = self.nodes.iter().map(|n| (n.id, 0)).collect();
        for c in &self.connections {
            *indegree.get_mut(&c.target).unwrap() += 1;
        }
        let mut ready: Vec<u64> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&id, _)| id)
            .collect();
        let mut visited = 0;
        while let Some(n) = ready.pop() {
            visited += 1;
            for c in self.connections.iter().filter(|c| c.source == n) {
                let d = indegree.get_mut(&c.target).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(c.target);
                }
            }
        }
        visited != self.nodes.len()
    }

    /// Bit-vector size implied by a direct genome's arity.
    pub fn direct_bits(&self) -> Result<usize> {
        let (i, o) = (self.input_count(), self.output_count());
        if i < 4 || i % 2 != 0 || o < 7 || (o - 5) % 2 != 0 || (i - 2) / 2 != (o - 5) / 2 {
            return Err(Error::InvalidGenome(format!(
                "arity {i} inputs / {o} outputs does not match any copy-task controller"
            )));
        }
        Ok((i - 2) / 2)
    }

    /// Generic decode: inputs, outputs and hidden nodes in id order; enabled
    /// bias-node connections become node biases.
    pub fn decode_with(
        &self,
        input_tag: impl Fn(usize) -> NodeTag,
        output_tag: impl Fn(usize) -> NodeTag,
    ) -> Result<Network> {
        let mut b = NetworkBuilder::new();
        let mut slot = BTreeMap::new();
        let mut bias_id = None;
        let (mut ni, mut no) = (0, 0);
        for n in &self.nodes {
            let s = match n.role {
                NodeRole::Input => {
                    ni += 1;
                    b.input(input_tag(ni - 1), None)
                }
                NodeRole::Bias => {
                    bias_id = Some(n.id);
                    continue;
                }
                NodeRole::Output => {
                    no += 1;
                    b.output(output_tag(no - 1), None, n.activation, 0.0)
                }
                NodeRole::Hidden => b.hidden(NodeTag::Hidden(n.id), n.activation, 0.0),
            };
            slot.insert(n.id, s);
        }
        for c in self.connections.iter().filter(|c| c.enabled) {
            let missing = || Error::InvalidGenome(format!("dangling connection {}", c.innovation));
            let t = *slot.get(&c.target).ok_or_else(missing)?;
            if Some(c.source) == bias_id {
                b.add_bias(t, c.weight);
            } else {
                let s = *slot.get(&c.source).ok_or_else(missing)?;
                b.connect(s, t, c.weight);
            }
        }
        b.build()
    }

    /// Decodes a direct genome into a copy-task controller.
    pub fn decode_controller(&self) -> Result<Network> {
        if self.kind != GenomeKind::Direct {
            return Err(Error::Contract(
                "a CPPN genome must be synthesized over a substrate".into(),
            ));
        }
        let bits = self.direct_bits()?;
        let ins = substrate::input_roles(bits);
        let outs = substrate::output_roles(bits);
        self.decode_with(
            |k| NodeTag::Substrate(ins[k]),
            |k| NodeTag::Substrate(outs[k]),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("genome serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GenomeFile = serde_json::from_str(text)?;
        Genome::try_from(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    /// Structural identity: same nodes and same connection genes ignoring weights.
    pub fn same_topology(&self, other: &Genome) -> bool {
        self.kind == other.kind
            && self.nodes == other.nodes
            && self.connections.len() == other.connections.len()
            && self
                .connections
                .iter()
                .zip(&other.connections)
                .all(|(a, b)| {
                    a.innovation == b.innovation
                        && a.source == b.source
                        && a.target == b.target
                        && a.enabled == b.enabled
                })
    }
}

/// Minimal direct controller genome for a bit-vector size.
pub(crate) fn direct_minimal(bits: usize) -> Genome {
    let outs = vec![Activation::Logistic; substrate::output_count(bits)];
    Genome::minimal(GenomeKind::Direct, substrate::input_count(bits), &outs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conn(innovation: u64, source: u64, target: u64, weight: f64) -> ConnectionGene {
        ConnectionGene {
            innovation,
            source,
            target,
            weight,
            enabled: true,
        }
    }

    #[test]
    fn minimal_direct_genome_layout() {
        let g = direct_minimal(1);
        assert_eq!(g.input_count(), 4);
        assert_eq!(g.output_count(), 7);
        assert_eq!(g.direct_bits().unwrap(), 1);
        g.validate().unwrap();
    }

    #[test]
    fn json_round_trip_is_exact() {
        let g = direct_minimal(1);
        let (kind, nodes, _) = g.into_parts();
        let w = 0.1 + 0.2;
        let g = Genome::from_parts(kind, nodes, vec![conn(3, 0, 5, w), conn(4, 4, 6, -1e-300)])
            .unwrap();
        let back = Genome::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.connections()[0].weight.to_bits(), w.to_bits());
    }

    #[test]
    fn rejects_dangling_and_duplicate_connections() {
        let (kind, nodes, _) = direct_minimal(1).into_parts();
        assert!(Genome::from_parts(kind, nodes.clone(), vec![conn(0, 0, 99, 1.0)]).is_err());
        assert!(Genome::from_parts(
            kind,
            nodes.clone(),
            vec![conn(0, 0, 5, 1.0), conn(1, 0, 5, 2.0)]
        )
        .is_err());
        assert!(Genome::from_parts(kind, nodes, vec![conn(0, 5, 0, 1.0)]).is_err());
    }

    #[test]
    fn bias_connections_fold_into_node_bias() {
        let (kind, nodes, _) = direct_minimal(1).into_parts();
        // bias node id 4 -> first output id 5
        let g = Genome::from_parts(kind, nodes, vec![conn(0, 4, 5, 1.5)]).unwrap();
        let net = g.decode_controller().unwrap();
        assert_eq!(net.connection_count(), 0);
        assert_eq!(net.bias(net.output_slot(0)), Some(1.5));
    }

    #[test]
    fn wrong_arity_is_rejected() {
        let g = Genome::minimal(GenomeKind::Direct, 3, &[Activation::Logistic; 7]);
        assert!(g.validate().is_err());
    }
}
