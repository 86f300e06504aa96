use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::episode::{generate_episode, generate_fixed_episode, run_episode};
use super::FitnessBand;
use crate::cppn::Activation;
use crate::entm::MemoryTape;
use crate::neat::Genome;
use crate::network::{Network, NetworkBuilder, NodeTag};
use crate::substrate::{self, build_substrate, SubstrateRole};
use crate::{rng, Result};

/// Training score at or above which a controller counts as a solution.
pub const SOLUTION_THRESHOLD: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthSpec {
    /// Uniform in `[1, max]`.
    Uniform(usize),
    Fixed(usize),
}

/// A set of independent episodes scored as one mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Battery {
    pub episodes: usize,
    pub lengths: LengthSpec,
    pub band: FitnessBand,
}

impl Battery {
    pub const fn training() -> Self {
        Battery {
            episodes: 50,
            lengths: LengthSpec::Uniform(10),
            band: FitnessBand::CONTINUOUS,
        }
    }

    pub const fn generalization() -> Self {
        Battery {
            episodes: 100,
            lengths: LengthSpec::Uniform(10),
            band: FitnessBand::CONTINUOUS,
        }
    }

    pub const fn long_sequence() -> Self {
        Battery {
            episodes: 50,
            lengths: LengthSpec::Fixed(100),
            band: FitnessBand::CONTINUOUS,
        }
    }

    pub fn with_band(mut self, band: FitnessBand) -> Self {
        self.band = band;
        self
    }

    /// Draws one battery seed from `rng` and evaluates.
    pub fn evaluate(&self, controller: &Network, bits: usize, rng: &mut impl RngCore) -> Result<f64> {
        self.evaluate_seeded(controller, bits, rng.next_u64())
    }

    /// Episode `k` uses its own stream derived from `(seed, k)`; every
    /// episode starts on a fresh single-cell tape.
    pub fn evaluate_seeded(&self, controller: &Network, bits: usize, seed: u64) -> Result<f64> {
        let scores = (0..self.episodes)
            .into_par_iter()
            .map(|k| self.run_one(controller, bits, seed, k))
            .collect::<Result<Vec<f64>>>()?;
        Ok(scores.iter().sum::<f64>() / self.episodes as f64)
    }

    /// Same as [`Battery::evaluate_seeded`] without spawning parallel work.
    pub fn evaluate_sequential(&self, controller: &Network, bits: usize, seed: u64) -> Result<f64> {
        let mut total = 0.0;
        for k in 0..self.episodes {
            total += self.run_one(controller, bits, seed, k)?;
        }
        Ok(total / self.episodes as f64)
    }

    fn run_one(&self, controller: &Network, bits: usize, seed: u64, k: usize) -> Result<f64> {
        let mut r = rng::stream(seed, &[k as u64]);
        let ep = match self.lengths {
            LengthSpec::Uniform(max) => generate_episode(bits, max, &mut r),
            LengthSpec::Fixed(len) => generate_fixed_episode(bits, len, &mut r),
        };
        let mut tape = MemoryTape::new(bits);
        Ok(run_episode(controller, &mut tape, &ep, self.band, false)?.score)
    }
}

/// Mean score over 50 fresh episodes of length 1..=10.
pub fn evaluate_training(controller: &Network, bits: usize, rng: &mut impl RngCore) -> Result<f64> {
    Battery::training().evaluate(controller, bits, rng)
}

/// Mean score over 100 fresh episodes of length 1..=10.
pub fn test_generalization(controller: &Network, bits: usize, rng: &mut impl RngCore) -> Result<f64> {
    Battery::generalization().evaluate(controller, bits, rng)
}

/// Mean score over 50 episodes of length 100.
pub fn test_long_sequence(controller: &Network, bits: usize, rng: &mut impl RngCore) -> Result<f64> {
    Battery::long_sequence().evaluate(controller, bits, rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub trained_bits: usize,
    pub target_bits: usize,
    pub episodes: usize,
    pub sequence_length: usize,
    pub connections: usize,
    pub score: f64,
    pub scaled_perfectly: bool,
}

/// Synthesises `cppn` at `target_bits` and runs the length-100 battery.
pub fn test_scaling(
    cppn: &Genome,
    trained_bits: usize,
    target_bits: usize,
    rng: &mut impl RngCore,
) -> Result<ScalingReport> {
    let scaled = substrate::rescale(cppn, trained_bits, target_bits)?;
    let battery = Battery::long_sequence();
    let score = battery.evaluate(&scaled.network, target_bits, rng)?;
    Ok(ScalingReport {
        trained_bits,
        target_bits,
        episodes: battery.episodes,
        sequence_length: 100,
        connections: scaled.network.connection_count(),
        score,
        scaled_perfectly: score >= SOLUTION_THRESHOLD,
    })
}

/// A hand-wired controller that solves the copy task exactly at any width:
/// it writes every input, always shifts right, and jumps back to the start
/// marker cell on the switch signal.
pub fn hand_wired_controller(bits: usize) -> Result<Network> {
    const W: f64 = 50.0;
    let s = build_substrate(bits)?;
    let mut b = NetworkBuilder::new();
    let ins: Vec<(SubstrateRole, usize)> = s
        .inputs()
        .iter()
        .map(|n| (n.role, b.input(NodeTag::Substrate(n.role), Some(n.position))))
        .collect();
    let find = |role: SubstrateRole| ins.iter().find(|(r, _)| *r == role).map(|&(_, i)| i);
    for n in s.outputs() {
        use SubstrateRole::*;
        let (source, bias) = match n.role {
            BitOut(k) => (find(MemRead(k)), -W / 2.0),
            MemWrite(k) => (find(BitIn(k)), -W / 2.0),
            Jump => (find(Switch), -W / 2.0),
            Interp | ShiftRight => (None, W / 2.0),
            _ => (None, -W / 2.0),
        };
        let o = b.output(NodeTag::Substrate(n.role), Some(n.position), Activation::Logistic, bias);
        if let Some(src) = source {
            b.connect(src, o, W);
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cppn::aligned_copy_cppn;

    #[test]
    fn hand_wired_controller_is_perfect() {
        for bits in [1, 3, 8] {
            let net = hand_wired_controller(bits).unwrap();
            let mut r = rng::stream(1, &[bits as u64]);
            assert_eq!(evaluate_training(&net, bits, &mut r).unwrap(), 1.0);
            assert_eq!(test_generalization(&net, bits, &mut r).unwrap(), 1.0);
        }
    }

    #[test]
    fn hand_wired_controller_handles_long_sequences() {
        let net = hand_wired_controller(2).unwrap();
        assert_eq!(test_long_sequence(&net, 2, &mut rng::stream(2, &[])).unwrap(), 1.0);
    }

    #[test]
    fn constant_half_output_scores_zero() {
        let s = build_substrate(2).unwrap();
        let mut b = NetworkBuilder::new();
        for n in s.inputs() {
            b.input(NodeTag::Substrate(n.role), None);
        }
        for n in s.outputs() {
            b.output(NodeTag::Substrate(n.role), None, Activation::Logistic, 0.0);
        }
        let net = b.build().unwrap();
        assert_eq!(evaluate_training(&net, 2, &mut rng::stream(3, &[])).unwrap(), 0.0);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let net = substrate::synthesize(&aligned_copy_cppn(), &build_substrate(3).unwrap(), substrate::W_MAX)
            .unwrap();
        let b = Battery::generalization();
        let a = b.evaluate_seeded(&net, 3, 99).unwrap();
        let c = b.evaluate_sequential(&net, 3, 99).unwrap();
        assert_eq!(a.to_bits(), c.to_bits());
        assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn identity_scaling_matches_long_battery() {
        let cppn = aligned_copy_cppn();
        let report = test_scaling(&cppn, 3, 3, &mut rng::stream(4, &[])).unwrap();
        let net = substrate::synthesize(&cppn, &build_substrate(3).unwrap(), substrate::W_MAX).unwrap();
        let direct = test_long_sequence(&net, 3, &mut rng::stream(4, &[])).unwrap();
        assert_eq!(report.score, direct);
        assert!(report.scaled_perfectly, "score {}", report.score);
    }
}
