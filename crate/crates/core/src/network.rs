//! Executable phenotype: a feed-forward network evaluated in topological order.
//!
//! Both encodings decode into this type. Direct genomes may carry hidden
//! nodes; substrate networks never do. Node biases are explicit; bias-node
//! connections in genomes are folded into them at decode time.

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use serde::Serialize;

use crate::cppn::Activation;
use crate::substrate::SubstrateRole;
use crate::{Error, Result};

/// What a network node stands for, kept for export and inspection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeTag {
    Substrate(SubstrateRole),
    Input(usize),
    Output(usize),
    Hidden(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Input,
    Hidden,
    Output,
}

#[derive(Debug, Clone)]
struct PendingNode {
    kind: Kind,
    tag: NodeTag,
    position: Option<[f64; 3]>,
    bias: f64,
    activation: Activation,
}

/// Incrementally describes a network; [`NetworkBuilder::build`] orders and validates it.
#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    nodes: Vec<PendingNode>,
    edges: Vec<(usize, usize, f64)>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn input(&mut self, tag: NodeTag, position: Option<[f64; 3]>) -> usize {
        self.push(Kind::Input, tag, position, 0.0, Activation::Linear)
    }

    pub fn hidden(&mut self, tag: NodeTag, activation: Activation, bias: f64) -> usize {
        self.push(Kind::Hidden, tag, None, bias, activation)
    }

    pub fn output(
        &mut self,
        tag: NodeTag,
        position: Option<[f64; 3]>,
        activation: Activation,
        bias: f64,
    ) -> usize {
        self.push(Kind::Output, tag, position, bias, activation)
    }

    fn push(
        &mut self,
        kind: Kind,
        tag: NodeTag,
        position: Option<[f64; 3]>,
        bias: f64,
        activation: Activation,
    ) -> usize {
        self.nodes.push(PendingNode {
            kind,
            tag,
            position,
            bias,
            activation,
        });
        self.nodes.len() - 1
    }

    pub fn add_bias(&mut self, node: usize, delta: f64) {
        self.nodes[node].bias += delta;
    }

    pub fn connect(&mut self, source: usize, target: usize, weight: f64) {
        self.edges.push((source, target, weight));
    }

    /// Orders nodes topologically (inputs first, ties by insertion order).
    pub fn build(self) -> Result<Network> {
        let n = self.nodes.len();
        let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indegree = vec![0usize; n];
        for &(s, t, w) in &self.edges {
            if s >= n || t >= n {
                return Err(Error::InvalidGenome(format!(
                    "connection {s}->{t} references a missing node"
                )));
            }
            if self.nodes[t].kind == Kind::Input {
                return Err(Error::InvalidGenome(format!(
                    "connection {s}->{t} targets an input node"
                )));
            }
            incoming[t].push((s, w));
            outgoing[s].push(t);
            indegree[t] += 1;
        }

        let mut order = Vec::with_capacity(n);
        order.extend((0..n).filter(|&i| self.nodes[i].kind == Kind::Input));
        let mut ready: BinaryHeap<Reverse<usize>> = (0..n)
            .filter(|&i| self.nodes[i].kind != Kind::Input && indegree[i] == 0)
            .map(Reverse)
            .collect();
        for &i in &order {
            for &t in &outgoing[i] {
                indegree[t] -= 1;
                if indegree[t] == 0 {
                    ready.push(Reverse(t));
                }
            }
        }
        while let Some(Reverse(i)) = ready.pop() {
            order.push(i);
            for &t in &outgoing[i] {
                indegree[t] -= 1;
                if indegree[t] == 0 {
                    ready.push(Reverse(t));
                }
            }
        }
        if order.len() != n {
            return Err(Error::InvalidGenome("cycle detected in network graph".into()));
        }

        let mut slot = vec![0usize; n];
        for (pos, &i) in order.iter().enumerate() {
            slot[i] = pos;
        }
        let input_count = self.nodes.iter().filter(|p| p.kind == Kind::Input).count();
        let mut compute = Vec::with_capacity(n - input_count);
        let mut sources = Vec::with_capacity(self.edges.len());
        let mut weights = Vec::with_capacity(self.edges.len());
        for &i in &order[input_count..] {
            let start = sources.len();
            for &(s, w) in &incoming[i] {
                sources.push(slot[s] as u32);
                weights.push(w);
            }
            let node = &self.nodes[i];
            compute.push(ComputeNode {
                bias: node.bias,
                activation: node.activation,
                start: start as u32,
                end: sources.len() as u32,
            });
        }
        let outputs = (0..n)
            .filter(|&i| self.nodes[i].kind == Kind::Output)
            .map(|i| slot[i])
            .collect();
        let meta = order
            .iter()
            .map(|&i| NodeMeta {
                tag: self.nodes[i].tag,
                position: self.nodes[i].position,
            })
            .collect();
        Ok(Network {
            input_count,
            compute,
            sources,
            weights,
            outputs,
            meta,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
struct ComputeNode {
    bias: f64,
    activation: Activation,
    start: u32,
    end: u32,
}

#[derive(Debug, Clone, PartialEq)]
struct NodeMeta {
    tag: NodeTag,
    position: Option<[f64; 3]>,
}

/// Immutable, executable network. Values are laid out inputs first, then
/// every computed node in topological order.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    input_count: usize,
    compute: Vec<ComputeNode>,
    sources: Vec<u32>,
    weights: Vec<f64>,
    outputs: Vec<usize>,
    meta: Vec<NodeMeta>,
}

impl Network {
    pub fn input_count(&self) -> usize {
        self.input_count
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn node_count(&self) -> usize {
        self.meta.len()
    }

    pub fn hidden_count(&self) -> usize {
        self.node_count() - self.input_count - self.outputs.len()
    }

    pub fn connection_count(&self) -> usize {
        self.sources.len()
    }

    /// `(source, target, weight)` over value slots.
    pub fn connections(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.compute.iter().enumerate().flat_map(move |(k, node)| {
            let target = self.input_count + k;
            (node.start as usize..node.end as usize)
                .map(move |e| (self.sources[e] as usize, target, self.weights[e]))
        })
    }

    pub fn tag(&self, slot: usize) -> NodeTag {
        self.meta[slot].tag
    }

    pub fn position(&self, slot: usize) -> Option<[f64; 3]> {
        self.meta[slot].position
    }

    /// Bias of a computed slot; inputs carry none.
    pub fn bias(&self, slot: usize) -> Option<f64> {
        slot.checked_sub(self.input_count)
            .and_then(|k| self.compute.get(k))
            .map(|c| c.bias)
    }

    /// Value slot of the `k`-th output.
    pub fn output_slot(&self, k: usize) -> usize {
        self.outputs[k]
    }

    /// Runs one forward pass. `scratch` is resized as needed and may be reused.
    pub fn activate(&self, inputs: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) {
        debug_assert_eq!(inputs.len(), self.input_count);
        debug_assert_eq!(out.len(), self.outputs.len());
        scratch.resize(self.meta.len(), 0.0);
        scratch[..self.input_count].copy_from_slice(inputs);
        for (k, node) in self.compute.iter().enumerate() {
            let mut sum = node.bias;
            for e in node.start as usize..node.end as usize {
                sum += self.weights[e] * scratch[self.sources[e] as usize];
            }
            scratch[self.input_count + k] = node.activation.apply(sum);
        }
        for (o, &slot) in out.iter_mut().zip(&self.outputs) {
            *o = scratch[slot];
        }
    }

    pub fn activate_vec(&self, inputs: &[f64]) -> Vec<f64> {
        let mut scratch = Vec::new();
        let mut out = vec![0.0; self.outputs.len()];
        self.activate(inputs, &mut scratch, &mut out);
        out
    }

    /// JSON-ready adjacency list.
    pub fn export(&self) -> NetworkExport {
        let nodes = self
            .meta
            .iter()
            .enumerate()
            .map(|(slot, m)| ExportNode {
                slot,
                tag: m.tag,
                position: m.position,
                bias: self.bias(slot),
                activation: slot
                    .checked_sub(self.input_count)
                    .map(|k| self.compute[k].activation),
            })
            .collect();
        let connections = self
            .connections()
            .map(|(source, target, weight)| ExportConnection {
                source,
                target,
                weight,
            })
            .collect();
        NetworkExport {
            inputs: self.input_count,
            outputs: self.outputs.clone(),
            hidden: self.hidden_count(),
            nodes,
            connections,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NetworkExport {
    pub inputs: usize,
    pub outputs: Vec<usize>,
    pub hidden: usize,
    pub nodes: Vec<ExportNode>,
    pub connections: Vec<ExportConnection>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExportNode {
    pub slot: usize,
    pub tag: NodeTag,
    pub position: Option<[f64; 3]>,
    pub bias: Option<f64>,
    pub activation: Option<Activation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExportConnection {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hidden_chain_evaluates_in_order() {
        let mut b = NetworkBuilder::new();
        let out = b.output(NodeTag::Output(0), None, Activation::Linear, 0.0);
        let i = b.input(NodeTag::Input(0), None);
        let h = b.hidden(NodeTag::Hidden(9), Activation::Linear, 0.1);
        b.connect(h, out, 2.0);
        b.connect(i, h, 0.5);
        let net = b.build().unwrap();
        assert_eq!(net.hidden_count(), 1);
        // out = clamp(2 * clamp(0.5 * 0.4 + 0.1))
        let y = net.activate_vec(&[0.4]);
        assert!((y[0] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn cycle_is_rejected() {
        let mut b = NetworkBuilder::new();
        let _ = b.input(NodeTag::Input(0), None);
        let h1 = b.hidden(NodeTag::Hidden(1), Activation::Linear, 0.0);
        let h2 = b.hidden(NodeTag::Hidden(2), Activation::Linear, 0.0);
        b.connect(h1, h2, 1.0);
        b.connect(h2, h1, 1.0);
        assert!(matches!(b.build(), Err(Error::InvalidGenome(_))));
    }

    #[test]
    fn edge_into_input_is_rejected() {
        let mut b = NetworkBuilder::new();
        let i = b.input(NodeTag::Input(0), None);
        let o = b.output(NodeTag::Output(0), None, Activation::Linear, 0.0);
        b.connect(o, i, 1.0);
        assert!(b.build().is_err());
    }
}
