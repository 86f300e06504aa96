//! CPPN specialisation of the genome: activation palette, queries, and the
//! locality seed.
//!
//! A CPPN takes the 3-D coordinates of a connection's source and target
//! (plus a constant bias input) and answers three values: the raw weight,
//! the link-expression output (LEO, a step function) and a raw node bias.
//! Bias queries are node-centric: source and target coordinates coincide.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::neat::{ConnectionGene, Genome, GenomeKind, NodeGene, NodeRole};
use crate::network::{Network, NodeTag};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    /// `clamp(x, -1, 1)`
    Linear,
    /// `exp(-4 x^2)`
    Gaussian,
    /// Bipolar steepened sigmoid `2 / (1 + exp(-4.9 x)) - 1`.
    Sigmoid,
    Sine,
    /// `1` if `x > 0`, else `0`. Reserved for the LEO output.
    Step,
    /// Unipolar steepened sigmoid `1 / (1 + exp(-4.9 x))`, used by controllers.
    Logistic,
}

pub const GAUSSIAN_SHARPNESS: f64 = 4.0;
pub const SIGMOID_SLOPE: f64 = 4.9;

/// Functions available to new hidden CPPN nodes, drawn uniformly.
pub const HIDDEN_PALETTE: [Activation; 4] = [
    Activation::Linear,
    Activation::Gaussian,
    Activation::Sigmoid,
    Activation::Sine,
];

/// Weight, LEO and bias outputs.
pub const OUTPUT_ACTIVATIONS: [Activation; 3] =
    [Activation::Linear, Activation::Step, Activation::Linear];

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Linear => x.clamp(-1.0, 1.0),
            Activation::Gaussian => (-x * x * GAUSSIAN_SHARPNESS).exp(),
            Activation::Sigmoid => 2.0 / (1.0 + (-SIGMOID_SLOPE * x).exp()) - 1.0,
            Activation::Sine => x.sin(),
            Activation::Step => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Logistic => 1.0 / (1.0 + (-SIGMOID_SLOPE * x).exp()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Linear => "linear",
            Activation::Gaussian => "gaussian",
            Activation::Sigmoid => "sigmoid",
            Activation::Sine => "sine",
            Activation::Step => "step",
            Activation::Logistic => "logistic",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Activation::Linear,
            Activation::Gaussian,
            Activation::Sigmoid,
            Activation::Sine,
            Activation::Step,
            Activation::Logistic,
        ]
        .into_iter()
        .find(|a| a.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown activation function `{s}`")))
    }
}

/// Evaluates `tag` at `x`, parsing the tag first.
pub fn activation(tag: &str, x: f64) -> Result<f64> {
    Ok(tag.parse::<Activation>()?.apply(x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CppnQuery {
    pub source: [f64; 3],
    pub target: [f64; 3],
}

impl CppnQuery {
    pub fn new(source: [f64; 3], target: [f64; 3]) -> Self {
        CppnQuery { source, target }
    }

    /// Source and target both at `p`, used for bias queries.
    pub fn node_centric(p: [f64; 3]) -> Self {
        CppnQuery {
            source: p,
            target: p,
        }
    }

    fn inputs(&self) -> [f64; 6] {
        let [x1, y1, z1] = self.source;
        let [x2, y2, z2] = self.target;
        [x1, y1, z1, x2, y2, z2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CppnResponse {
    pub weight_raw: f64,
    pub leo_raw: f64,
    pub bias_raw: f64,
}

impl CppnResponse {
    pub fn expressed(&self) -> bool {
        self.leo_raw > 0.5
    }
}

/// A validated CPPN ready for repeated queries.
#[derive(Debug, Clone)]
pub struct Cppn {
    net: Network,
}

const INPUT_NAMES: [&str; 6] = ["x1", "y1", "z1", "x2", "y2", "z2"];

impl Cppn {
    /// Validates `genome` (including acyclicity) and compiles it.
    pub fn new(genome: &Genome) -> Result<Self> {
        if genome.kind() != GenomeKind::Cppn {
            return Err(Error::InvalidGenome("expected a CPPN genome".into()));
        }
        genome.validate()?;
        let net = genome.decode_with(NodeTag::Input, NodeTag::Output)?;
        Ok(Cppn { net })
    }

    pub fn query_with(&self, q: &CppnQuery, scratch: &mut Vec<f64>) -> CppnResponse {
        let mut out = [0.0; 3];
        self.net.activate(&q.inputs(), scratch, &mut out);
        CppnResponse {
            weight_raw: out[0],
            leo_raw: out[1],
            bias_raw: out[2],
        }
    }

    pub fn query(&self, q: &CppnQuery) -> CppnResponse {
        self.query_with(q, &mut Vec::new())
    }

    pub fn input_names() -> [&'static str; 6] {
        INPUT_NAMES
    }
}

/// One-off evaluation; compiles the genome on every call.
pub fn evaluate(cppn: &Genome, query: &CppnQuery) -> Result<CppnResponse> {
    Ok(Cppn::new(cppn)?.query(query))
}

// Node ids of a fresh CPPN genome.
const X1: u64 = 0;
const Y1: u64 = 1;
const X2: u64 = 3;
const Y2: u64 = 4;
const BIAS: u64 = 6;
const OUT_WEIGHT: u64 = 7;
const OUT_LEO: u64 = 8;
const OUT_BIAS: u64 = 9;

/// LEO fires when `Gx + Gy` exceeds `2 - margin`, i.e. only for coordinate
/// pairs that coincide on both x and y (up to ~1e-5 apart).
pub const LOCALITY_MARGIN: f64 = 1e-9;

/// CPPN with six coordinate inputs, a bias node and the three outputs, no connections.
pub fn minimal_cppn() -> Genome {
    Genome::minimal(GenomeKind::Cppn, 6, &OUTPUT_ACTIVATIONS)
}

fn gene(innovation: u64, source: u64, target: u64, weight: f64) -> ConnectionGene {
    ConnectionGene {
        innovation,
        source,
        target,
        weight,
        enabled: true,
    }
}

fn hidden(id: u64, activation: Activation) -> NodeGene {
    NodeGene {
        id,
        role: NodeRole::Hidden,
        activation,
    }
}

/// The locality seed: Gaussian `Gx` fed by `x1 - x2`, Gaussian `Gy` fed by
/// `y1 - y2`, both driving the LEO step output against a bias just under 2,
/// so LEO fires only when source and target are aligned on x and y. The
/// weight output gets a constant linear path from the bias input; the bias
/// output starts unconnected.
///
/// The exact wiring of the published seed figure is not machine readable;
/// this constructor reproduces its stated behaviour.
pub fn locality_seed() -> Genome {
    let (kind, mut nodes, _) = minimal_cppn().into_parts();
    let (gx, gy) = (10, 11);
    nodes.push(hidden(gx, Activation::Gaussian));
    nodes.push(hidden(gy, Activation::Gaussian));
    let connections = vec![
        gene(0, X1, gx, 1.0),
        gene(1, X2, gx, -1.0),
        gene(2, Y1, gy, 1.0),
        gene(3, Y2, gy, -1.0),
        gene(4, gx, OUT_LEO, 1.0),
        gene(5, gy, OUT_LEO, 1.0),
        gene(6, BIAS, OUT_LEO, -(2.0 - LOCALITY_MARGIN)),
        gene(7, BIAS, OUT_WEIGHT, 1.0),
    ];
    Genome::from_parts(kind, nodes, connections).expect("seed is valid by construction")
}

/// Hand-built CPPN that solves the copy task at every bit size: the
/// locality seed plus a bias head. Bias queries give -0.5 for data outputs
/// and the jump output, 1.0 for interpolation and 0.8 for shift-right, so
/// the controller writes each bit, always shifts right, and jumps back to
/// the first cell on the switch signal.
pub fn aligned_copy_cppn() -> Genome {
    let (kind, mut nodes, mut connections) = locality_seed().into_parts();
    let (g_interp, g_right) = (12, 13);
    nodes.push(hidden(g_interp, Activation::Gaussian));
    nodes.push(hidden(g_right, Activation::Gaussian));
    connections.extend([
        // peaks at (x, y) = (-0.2, 1)
        gene(8, X2, g_interp, 2.5),
        gene(9, Y2, g_interp, 2.5),
        gene(10, BIAS, g_interp, -2.0),
        // peaks at (x, y) = (1, 1)
        gene(11, X2, g_right, 2.5),
        gene(12, Y2, g_right, 2.5),
        gene(13, BIAS, g_right, -5.0),
        gene(14, BIAS, OUT_BIAS, -0.5),
        gene(15, g_interp, OUT_BIAS, 1.5),
        gene(16, g_right, OUT_BIAS, 1.3),
    ]);
    Genome::from_parts(kind, nodes, connections).expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn palette_point_values() {
        assert_eq!(Activation::Gaussian.apply(0.0), 1.0);
        assert_eq!(Activation::Sine.apply(0.0), 0.0);
        assert_eq!(Activation::Step.apply(-0.001), 0.0);
        assert_eq!(Activation::Step.apply(0.001), 1.0);
        assert_eq!(Activation::Step.apply(0.0), 0.0);
        assert_eq!(Activation::Linear.apply(3.0), 1.0);
        assert_eq!(Activation::Sigmoid.apply(0.0), 0.0);
        assert_eq!(Activation::Logistic.apply(0.0), 0.5);
    }

    #[test]
    fn unknown_tag_is_a_config_error() {
        assert!(matches!(activation("relu", 0.0), Err(Error::Config(_))));
        assert_eq!(activation("gaussian", 0.0).unwrap(), 1.0);
    }

    #[test]
    fn empty_cppn_outputs_zero() {
        let c = Cppn::new(&minimal_cppn()).unwrap();
        for q in [
            CppnQuery::new([0.1, 0.2, 0.3], [-1.0, 1.0, -1.0]),
            CppnQuery::node_centric([0.0; 3]),
        ] {
            let r = c.query(&q);
            assert_eq!((r.weight_raw, r.leo_raw, r.bias_raw), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn constant_weight_path() {
        let (kind, nodes, _) = minimal_cppn().into_parts();
        let g = Genome::from_parts(kind, nodes, vec![gene(0, BIAS, OUT_WEIGHT, 1.0)]).unwrap();
        let c = Cppn::new(&g).unwrap();
        for x in [-1.0, 0.0, 0.7] {
            let r = c.query(&CppnQuery::new([x, -x, 1.0], [x * 0.5, 1.0, -1.0]));
            assert_eq!(r.weight_raw, 1.0);
        }
    }

    #[test]
    fn cyclic_cppn_is_rejected() {
        let (kind, mut nodes, _) = minimal_cppn().into_parts();
        nodes.push(hidden(10, Activation::Sine));
        nodes.push(hidden(11, Activation::Sine));
        let g = Genome::from_parts(kind, nodes, vec![gene(0, 10, 11, 1.0), gene(1, 11, 10, 1.0)]);
        assert!(matches!(g, Err(Error::InvalidGenome(m)) if m.contains("cycle")));
    }

    #[test]
    fn seed_fires_only_when_aligned() {
        let c = Cppn::new(&locality_seed()).unwrap();
        let r = c.query(&CppnQuery::new([0.5, 1.0, 1.0], [0.5, 1.0, -1.0]));
        assert_eq!(r.leo_raw, 1.0);
        let r = c.query(&CppnQuery::new([-1.0, 1.0, 1.0], [1.0, 1.0, -1.0]));
        assert_eq!(r.leo_raw, 0.0);
        assert_eq!(r.bias_raw, 0.0);
    }

    #[test]
    fn seed_leo_peaks_on_the_diagonal() {
        // 11^4 grid over (x1, y1, x2, y2); the maximum is attained exactly
        // where x1 == x2 and y1 == y2, and nowhere else.
        let c = Cppn::new(&locality_seed()).unwrap();
        let grid: Vec<f64> = (0..11).map(|k| -1.0 + 0.2 * k as f64).collect();
        let mut scratch = Vec::new();
        for &x1 in &grid {
            for &y1 in &grid {
                for &x2 in &grid {
                    for &y2 in &grid {
                        let r = c.query_with(
                            &CppnQuery::new([x1, y1, 1.0], [x2, y2, -1.0]),
                            &mut scratch,
                        );
                        assert_eq!(r.leo_raw == 1.0, x1 == x2 && y1 == y2);
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn palette_is_bounded(x in -10.0..10.0f64) {
            for a in HIDDEN_PALETTE {
                let y = a.apply(x);
                prop_assert!((-1.0..=1.0).contains(&y));
            }
            let s = Activation::Step.apply(x);
            prop_assert!(s == 0.0 || s == 1.0);
            prop_assert!((0.0..=1.0).contains(&Activation::Logistic.apply(x)));
        }

        #[test]
        fn seed_is_symmetric_per_axis(
            x1 in -1.0..1.0f64, x2 in -1.0..1.0f64,
            y1 in -1.0..1.0f64, y2 in -1.0..1.0f64,
            z1 in -1.0..1.0f64, z2 in -1.0..1.0f64,
        ) {
            let c = Cppn::new(&locality_seed()).unwrap();
            let base = c.query(&CppnQuery::new([x1, y1, z1], [x2, y2, z2])).leo_raw;
            let swap_x = c.query(&CppnQuery::new([x2, y1, z1], [x1, y2, z2])).leo_raw;
            let swap_y = c.query(&CppnQuery::new([x1, y2, z1], [x2, y1, z2])).leo_raw;
            prop_assert_eq!(base, swap_x);
            prop_assert_eq!(base, swap_y);
        }
    }
}
