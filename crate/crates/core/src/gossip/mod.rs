//! Communication graph, mixing matrix and the push-sum protocol.

mod mixing;
mod push_sum;
mod topology;

pub use mixing::{build_metropolis_matrix, MixingMatrix};
pub use push_sum::{
    measured_rounds_for_accuracy, push_sum_round, push_vector, relative_error, rounds_for_accuracy,
    rounds_for_accuracy_with, GossipMode, GossipReport, PushSum, PushSumState, PushVectorOutcome,
    DEFAULT_ROUNDS_FACTOR,
};
pub use topology::Topology;
