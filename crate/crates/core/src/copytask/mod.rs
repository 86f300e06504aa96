//! The bit-vector copy task: episodes, fitness, evaluation batteries and
//! per-timestep activity recordings.
//!
//! Timeline for a sequence of length `L` (`2L + 2` steps): a start signal,
//! `L` input vectors, a switch signal, then `L` silent steps during which
//! the bit outputs are scored against the stored sequence.

mod battery;
mod episode;
mod fitness;
mod record;

pub use battery::{
    evaluate_training, hand_wired_controller, test_generalization, test_long_sequence, test_scaling, Battery,
    LengthSpec, ScalingReport, SOLUTION_THRESHOLD,
};
pub use episode::{generate_episode, generate_fixed_episode, run_episode, Episode, FitnessResult};
pub use fitness::{fitness_bit, FitnessBand};
pub use record::{ActivityRecording, ActivityStep, Phase};
