//! Copy-task substrate geometry and CPPN-to-controller synthesis.
//!
//! Inputs sit on `z = 1`, outputs on `z = -1`. Control nodes (start,
//! switch, head controls) use `y = 1`, data nodes (bits and memory) use
//! `y = -1`. Bit inputs share x-coordinates with memory write outputs,
//! memory read inputs with bit outputs, and the switch input with the jump
//! output. There are no hidden nodes.

use rayon::prelude::*;
use serde::Serialize;

use crate::cppn::{Activation, Cppn, CppnQuery};
use crate::neat::Genome;
use crate::network::{Network, NetworkBuilder, NodeTag};
use crate::{Error, Result};

/// Scale applied to raw CPPN weights and biases.
pub const W_MAX: f64 = 5.0;

pub const DATA_IN_INTERVAL: (f64, f64) = (-1.0, -0.2);
pub const DATA_OUT_INTERVAL: (f64, f64) = (0.2, 1.0);

const START_X: f64 = -1.0;
const SWITCH_X: f64 = -0.6;
const JUMP_X: f64 = SWITCH_X;
const INTERP_X: f64 = -0.2;
const SHIFT_LEFT_X: f64 = 0.2;
const SHIFT_STAY_X: f64 = 0.6;
const SHIFT_RIGHT_X: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubstrateRole {
    Start,
    Switch,
    BitIn(usize),
    MemRead(usize),
    BitOut(usize),
    MemWrite(usize),
    Jump,
    Interp,
    ShiftLeft,
    ShiftStay,
    ShiftRight,
}

pub fn input_count(bits: usize) -> usize {
    2 + 2 * bits
}

pub fn output_count(bits: usize) -> usize {
    5 + 2 * bits
}

/// Controller input order: start, switch, bit inputs, memory reads.
pub fn input_roles(bits: usize) -> Vec<SubstrateRole> {
    let mut r = vec![SubstrateRole::Start, SubstrateRole::Switch];
    r.extend((0..bits).map(SubstrateRole::BitIn));
    r.extend((0..bits).map(SubstrateRole::MemRead));
    r
}

/// Controller output order: bit outputs, memory writes, jump,
/// interpolation, shift left / stay / right.
pub fn output_roles(bits: usize) -> Vec<SubstrateRole> {
    let mut r: Vec<_> = (0..bits).map(SubstrateRole::BitOut).collect();
    r.extend((0..bits).map(SubstrateRole::MemWrite));
    r.extend([
        SubstrateRole::Jump,
        SubstrateRole::Interp,
        SubstrateRole::ShiftLeft,
        SubstrateRole::ShiftStay,
        SubstrateRole::ShiftRight,
    ]);
    r
}

/// `n` evenly spaced points over `[a, b]`; a single point sits at the midpoint.
pub fn linspace(a: f64, b: f64, n: usize, k: usize) -> f64 {
    if n == 1 {
        return 0.5 * (a + b);
    }
    let t = k as f64 / (n - 1) as f64;
    a * (1.0 - t) + b * t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubstrateNode {
    pub role: SubstrateRole,
    pub position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Substrate {
    bits: usize,
    inputs: Vec<SubstrateNode>,
    outputs: Vec<SubstrateNode>,
}

fn position(role: SubstrateRole, bits: usize) -> [f64; 3] {
    use SubstrateRole::*;
    let (lo_in, hi_in) = DATA_IN_INTERVAL;
    let (lo_out, hi_out) = DATA_OUT_INTERVAL;
    match role {
        Start => [START_X, 1.0, 1.0],
        Switch => [SWITCH_X, 1.0, 1.0],
        BitIn(k) => [linspace(lo_in, hi_in, bits, k), -1.0, 1.0],
        MemRead(k) => [linspace(lo_out, hi_out, bits, k), -1.0, 1.0],
        BitOut(k) => [linspace(lo_out, hi_out, bits, k), -1.0, -1.0],
        MemWrite(k) => [linspace(lo_in, hi_in, bits, k), -1.0, -1.0],
        Jump => [JUMP_X, 1.0, -1.0],
        Interp => [INTERP_X, 1.0, -1.0],
        ShiftLeft => [SHIFT_LEFT_X, 1.0, -1.0],
        ShiftStay => [SHIFT_STAY_X, 1.0, -1.0],
        ShiftRight => [SHIFT_RIGHT_X, 1.0, -1.0],
    }
}

/// Lays out the substrate for `bits`-wide vectors (memory width == bits).
pub fn build_substrate(bits: usize) -> Result<Substrate> {
    if bits < 1 {
        return Err(Error::Config("bit-vector size must be at least 1".into()));
    }
    let node = |role| SubstrateNode {
        role,
        position: position(role, bits),
    };
    Ok(Substrate {
        bits,
        inputs: input_roles(bits).into_iter().map(node).collect(),
        outputs: output_roles(bits).into_iter().map(node).collect(),
    })
}

impl Substrate {
    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn inputs(&self) -> &[SubstrateNode] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[SubstrateNode] {
        &self.outputs
    }

    pub fn node(&self, role: SubstrateRole) -> Option<&SubstrateNode> {
        self.inputs
            .iter()
            .chain(&self.outputs)
            .find(|n| n.role == role)
    }
}

/// Queries the CPPN for every (input, output) pair. A connection exists iff
/// the LEO output fires, with weight `weight_raw * w_max`; every output gets
/// bias `bias_raw * w_max` from a node-centric query. All outputs use the
/// unipolar steepened sigmoid.
pub fn synthesize(cppn: &Genome, substrate: &Substrate, w_max: f64) -> Result<Network> {
    let cppn = Cppn::new(cppn)?;
    synthesize_compiled(&cppn, substrate, w_max)
}

pub fn synthesize_compiled(cppn: &Cppn, substrate: &Substrate, w_max: f64) -> Result<Network> {
    let columns: Vec<(f64, Vec<(usize, f64)>)> = substrate
        .outputs
        .par_iter()
        .with_min_len(64)
        .map_init(Vec::new, |scratch, out| {
            let bias = cppn
                .query_with(&CppnQuery::node_centric(out.position), scratch)
                .bias_raw
                * w_max;
            let incoming = substrate
                .inputs
                .iter()
                .enumerate()
                .filter_map(|(i, inp)| {
                    let r = cppn.query_with(&CppnQuery::new(inp.position, out.position), scratch);
                    r.expressed().then(|| (i, r.weight_raw * w_max))
                })
                .collect();
            (bias, incoming)
        })
        .collect();

    let mut b = NetworkBuilder::new();
    let ins: Vec<usize> = substrate
        .inputs
        .iter()
        .map(|n| b.input(NodeTag::Substrate(n.role), Some(n.position)))
        .collect();
    for (n, (bias, incoming)) in substrate.outputs.iter().zip(columns) {
        let o = b.output(
            NodeTag::Substrate(n.role),
            Some(n.position),
            Activation::Logistic,
            bias,
        );
        for (i, w) in incoming {
            b.connect(ins[i], o, w);
        }
    }
    b.build()
}

/// A CPPN phenotype synthesised at a size other than the training size.
#[derive(Debug, Clone)]
pub struct ScaledNetwork {
    pub from_bits: usize,
    pub to_bits: usize,
    pub network: Network,
}

/// Synthesises `cppn` on the `to_bits` substrate; `from_bits` is only reported.
pub fn rescale(cppn: &Genome, from_bits: usize, to_bits: usize) -> Result<ScaledNetwork> {
    let substrate = build_substrate(to_bits)?;
    Ok(ScaledNetwork {
        from_bits,
        to_bits,
        network: synthesize(cppn, &substrate, W_MAX)?,
    })
}

/// Expressed connections as `(source role, target role)` pairs.
pub fn expressed_pairs(net: &Network) -> Vec<(SubstrateRole, SubstrateRole)> {
    net.connections()
        .filter_map(|(s, t, _)| match (net.tag(s), net.tag(t)) {
            (NodeTag::Substrate(a), NodeTag::Substrate(b)) => Some((a, b)),
            _ => None,
        })
        .collect()
}

/// The aligned pairs: bit input to memory write, memory read to bit output,
/// switch to jump.
pub fn aligned_pairs(bits: usize) -> Vec<(SubstrateRole, SubstrateRole)> {
    use SubstrateRole::*;
    let mut v: Vec<_> = (0..bits).map(|k| (BitIn(k), MemWrite(k))).collect();
    v.extend((0..bits).map(|k| (MemRead(k), BitOut(k))));
    v.push((Switch, Jump));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cppn::{locality_seed, minimal_cppn};
    use std::collections::BTreeSet;

    fn key(p: (SubstrateRole, SubstrateRole)) -> String {
        format!("{p:?}")
    }

    #[test]
    fn three_bit_layout() {
        let s = build_substrate(3).unwrap();
        assert_eq!(s.inputs().len(), 8);
        assert_eq!(s.outputs().len(), 11);
        let xs: Vec<f64> = (0..3)
            .map(|k| s.node(SubstrateRole::BitIn(k)).unwrap().position[0])
            .collect();
        for (x, want) in xs.iter().zip([-1.0, -0.6, -0.2]) {
            assert!((x - want).abs() < 1e-12);
        }
    }

    #[test]
    fn single_bit_sits_at_midpoint() {
        let s = build_substrate(1).unwrap();
        let bi = s.node(SubstrateRole::BitIn(0)).unwrap().position[0];
        let mw = s.node(SubstrateRole::MemWrite(0)).unwrap().position[0];
        assert_eq!(bi, mw);
        assert!((bi + 0.6).abs() < 1e-12);
    }

    #[test]
    fn zero_bits_is_rejected() {
        assert!(matches!(build_substrate(0), Err(Error::Config(_))));
    }

    #[test]
    fn layer_invariants() {
        let s = build_substrate(5).unwrap();
        assert!(s.inputs().iter().all(|n| n.position[2] == 1.0));
        assert!(s.outputs().iter().all(|n| n.position[2] == -1.0));
        for n in s.inputs().iter().chain(s.outputs()) {
            let control = matches!(
                n.role,
                SubstrateRole::Start
                    | SubstrateRole::Switch
                    | SubstrateRole::Jump
                    | SubstrateRole::Interp
                    | SubstrateRole::ShiftLeft
                    | SubstrateRole::ShiftStay
                    | SubstrateRole::ShiftRight
            );
            assert_eq!(n.position[1], if control { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn gated_cppn_yields_no_connections() {
        let s = build_substrate(3).unwrap();
        let net = synthesize(&minimal_cppn(), &s, W_MAX).unwrap();
        assert_eq!(net.connection_count(), 0);
        assert_eq!(net.hidden_count(), 0);
        assert_eq!(net.output_count(), 11);
    }

    #[test]
    fn seed_expresses_exactly_the_aligned_pairs() {
        // Oracle: enumerate all 8 x 11 queries by hand against the seed.
        let s = build_substrate(3).unwrap();
        let cppn = Cppn::new(&locality_seed()).unwrap();
        let mut want = BTreeSet::new();
        for i in s.inputs() {
            for o in s.outputs() {
                if cppn.query(&CppnQuery::new(i.position, o.position)).expressed() {
                    want.insert(key((i.role, o.role)));
                }
            }
        }
        assert_eq!(want.len(), 7);
        let aligned: BTreeSet<_> = aligned_pairs(3).into_iter().map(key).collect();
        assert_eq!(want, aligned);
        let net = synthesize(&locality_seed(), &s, W_MAX).unwrap();
        let got: BTreeSet<_> = expressed_pairs(&net).into_iter().map(key).collect();
        assert_eq!(got, aligned);
    }

    #[test]
    fn synthesis_is_deterministic() {
        let s = build_substrate(4).unwrap();
        let a = synthesize(&crate::cppn::aligned_copy_cppn(), &s, W_MAX).unwrap();
        let b = synthesize(&crate::cppn::aligned_copy_cppn(), &s, W_MAX).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rescale_matches_direct_synthesis_and_arity() {
        let c = locality_seed();
        let direct = synthesize(&c, &build_substrate(9).unwrap(), W_MAX).unwrap();
        assert_eq!(rescale(&c, 9, 9).unwrap().network, direct);
        for bits in [1, 3, 17] {
            let net = rescale(&c, 9, bits).unwrap().network;
            let got: BTreeSet<_> = expressed_pairs(&net).into_iter().map(key).collect();
            let want: BTreeSet<_> = aligned_pairs(bits).into_iter().map(key).collect();
            assert_eq!(got, want, "bits = {bits}");
        }
    }
}
