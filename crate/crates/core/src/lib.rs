//! Allocation-only core of the GADGET linear SVM solver.
//!
//! Every node of a simulated network holds a horizontal shard of the training
//! data, takes Pegasos-style sub-gradient steps on it and then averages its
//! weight vector with the rest of the network through push-sum gossip. This
//! crate carries the numerical and protocol pieces and performs no IO:
//!
//! - [`vector`]: sparse feature vectors and dense weight vectors.
//! - [`data`]: labelled instances, datasets and seeded horizontal partitioning.
//! - [`svm`]: hinge loss, the primal objective, the sub-gradient step, ball
//!   projection and the centralized Pegasos baseline.
//! - [`gossip`]: topologies, the Metropolis mixing matrix and push-sum.
//! - [`simnet`]: the synchronous round scheduler every gossip round runs on.
//! - [`gadget`]: the per-node state machine and the distributed training loop.
//! - [`eval`]: data radius, the regret bound certificate and report statistics.
//!
//! File formats, configuration and the command line live in the `gadget`
//! companion crate.

#![no_std]
#![warn(rust_2018_idioms, unused_qualifications)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod data;
pub mod eval;
pub mod gadget;
pub mod gossip;
pub mod rng;
pub mod simnet;
pub mod svm;
pub mod vector;

pub use error::{Error, Result};

pub use data::{partition, Dataset, Label, LabeledInstance, Shard};
pub use gadget::{check_convergence, gadget_iteration, gadget_train, GadgetConfig, GadgetOutcome, NodeState};
pub use gossip::{
    build_metropolis_matrix, push_sum_round, push_vector, rounds_for_accuracy, GossipMode,
    MixingMatrix, PushSumState, Topology,
};
pub use simnet::{Executor, Message, RoundScheduler, Sequential};
pub use svm::{pegasos_train, HyperParams, LossMode, Model};
pub use vector::{DenseVector, SparseVector};
