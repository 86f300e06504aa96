use rand::Rng;
use serde::{Deserialize, Serialize};

use super::record::{ActivityRecording, ActivityStep, Phase};
use super::FitnessBand;
use crate::entm::{MemoryTape, TmControls};
use crate::network::Network;
use crate::substrate;
use crate::{Error, Result};

/// A sequence of random bit vectors to be stored and recited.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub bits: usize,
    pub sequence: Vec<Vec<f64>>,
}

impl Episode {
    pub fn new(bits: usize, sequence: Vec<Vec<f64>>) -> Result<Self> {
        if bits == 0 || sequence.is_empty() || sequence.iter().any(|v| v.len() != bits) {
            return Err(Error::Contract(
                "an episode needs at least one vector, each of width `bits`".into(),
            ));
        }
        Ok(Episode { bits, sequence })
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// Number of controller timesteps: `2L + 2`.
    pub fn timesteps(&self) -> usize {
        2 * self.len() + 2
    }
}

/// Length uniform in `[1, max_len]`, bits i.i.d. uniform in `{0, 1}`.
pub fn generate_episode(bits: usize, max_len: usize, rng: &mut impl Rng) -> Episode {
    assert!(bits >= 1 && max_len >= 1);
    let len = rng.random_range(1..=max_len);
    generate_fixed_episode(bits, len, rng)
}

pub fn generate_fixed_episode(bits: usize, len: usize, rng: &mut impl Rng) -> Episode {
    assert!(bits >= 1 && len >= 1);
    let sequence = (0..len)
        .map(|_| (0..bits).map(|_| f64::from(rng.random::<bool>() as u8)).collect())
        .collect();
    Episode { bits, sequence }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitnessResult {
    /// Mean of `per_vector`.
    pub score: f64,
    pub per_vector: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recording: Option<ActivityRecording>,
}

/// Runs `controller` through one episode on `tape` and scores the recital.
pub fn run_episode(
    controller: &Network,
    tape: &mut MemoryTape,
    episode: &Episode,
    band: FitnessBand,
    record: bool,
) -> Result<FitnessResult> {
    let bits = episode.bits;
    if controller.input_count() != substrate::input_count(bits)
        || controller.output_count() != substrate::output_count(bits)
    {
        return Err(Error::Contract(format!(
            "controller has {} inputs / {} outputs, a {bits}-bit copy task needs {} / {}",
            controller.input_count(),
            controller.output_count(),
            substrate::input_count(bits),
            substrate::output_count(bits)
        )));
    }
    if tape.width() != bits {
        return Err(Error::Contract(format!(
            "tape width {} does not match {bits} bits",
            tape.width()
        )));
    }
    let len = episode.len();
    let mut inputs = vec![0.0; substrate::input_count(bits)];
    let mut outputs = vec![0.0; substrate::output_count(bits)];
    let mut scratch = Vec::new();
    let mut per_vector = Vec::with_capacity(len);
    let mut steps = Vec::with_capacity(if record { episode.timesteps() } else { 0 });

    for t in 0..episode.timesteps() {
        let phase = Phase::at(t, len);
        inputs[..2 + bits].fill(0.0);
        match phase {
            Phase::Start => inputs[0] = 1.0,
            Phase::Switch => inputs[1] = 1.0,
            Phase::Input => inputs[2..2 + bits].copy_from_slice(&episode.sequence[t - 1]),
            Phase::Output => {}
        }
        controller.activate(&inputs, &mut scratch, &mut outputs);

        let (bit_out, rest) = outputs.split_at(bits);
        let (write, ctl) = rest.split_at(bits);
        let controls = TmControls {
            write,
            jump: ctl[0],
            interp: ctl[1],
            shift_left: ctl[2],
            shift_stay: ctl[3],
            shift_right: ctl[4],
        };

        let target = (phase == Phase::Output).then(|| &episode.sequence[t - (len + 2)]);
        let vector_fitness = target.map(|target| {
            bit_out
                .iter()
                .zip(target)
                .map(|(&x, &y)| band.score(x, y))
                .sum::<f64>()
                / bits as f64
        });
        if let Some(f) = vector_fitness {
            per_vector.push(f);
        }

        if record {
            let trace = tape.step_traced(&controls)?;
            steps.push(ActivityStep {
                t,
                phase,
                start: inputs[0],
                switch: inputs[1],
                bit_in: inputs[2..2 + bits].to_vec(),
                bit_out: bit_out.to_vec(),
                target: target.cloned(),
                write: write.to_vec(),
                interp: controls.interp,
                jump: controls.jump,
                shift_left: controls.shift_left,
                shift_stay: controls.shift_stay,
                shift_right: controls.shift_right,
                jumped: trace.jumped,
                shift: trace.shift,
                written: trace.written,
                read: trace.read.clone(),
                head: trace.head,
                tape_len: trace.tape_len,
                vector_fitness,
            });
            inputs[2 + bits..].copy_from_slice(&trace.read);
        } else {
            let read = tape.step(&controls)?;
            inputs[2 + bits..].copy_from_slice(read);
        }
    }

    let score = per_vector.iter().sum::<f64>() / len as f64;
    Ok(FitnessResult {
        score,
        per_vector,
        recording: record.then(|| ActivityRecording { bits, length: len, steps }),
    })
}
