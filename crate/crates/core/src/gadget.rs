//! The GADGET node state machine and the distributed training loop.
//!
//! One iteration at every node: sample a local instance, take the Pegasos
//! half-step, optionally project onto the `1/sqrt(lambda)` ball, then replace
//! the local weights with the push-sum estimate of the network average and
//! optionally project again. All nodes finish iteration `t` before any node
//! starts `t + 1`.
//!
//! With shard-size weighting on, node `i` enters push-sum with protocol weight
//! `q_i = n_i * m / N` (its shard size relative to the mean shard size) and sum
//! `q_i * w_i`, so the estimates converge to `sum n_i w_i / N`. Equal shards
//! give `q_i = 1` exactly, which is the unweighted protocol.

use alloc::vec::Vec;

use crate::data::Shard;
use crate::error::{Error, Result};
use crate::gossip::{build_metropolis_matrix, rounds_for_accuracy, GossipMode, GossipReport, MixingMatrix, PushSum, Topology};
use crate::rng::{self, StreamRng};
use crate::simnet::{Executor, Sequential};
use crate::svm::{self, HyperParams, Model};
use crate::vector::DenseVector;

#[derive(Debug, Clone, PartialEq)]
pub struct GadgetConfig {
    pub hp: HyperParams,
    pub topology: Topology,
    pub mixing: MixingMatrix,
    /// Push-sum rounds per iteration.
    pub gossip_rounds: usize,
    pub gossip_mode: GossipMode,
    pub weight_by_shard_size: bool,
}

impl GadgetConfig {
    /// Relative gossip accuracy the default round budget is sized for.
    pub const DEFAULT_GAMMA: f64 = 1e-4;

    /// Metropolis weights over `topology`, deterministic gossip, shard-size
    /// weighting, and `rounds_for_accuracy(topology, 1e-4)` rounds.
    pub fn new(hp: HyperParams, topology: Topology) -> Result<Self> {
        let mixing = build_metropolis_matrix(&topology)?;
        let gossip_rounds = rounds_for_accuracy(&topology, Self::DEFAULT_GAMMA)?;
        let cfg = GadgetConfig {
            hp,
            topology,
            mixing,
            gossip_rounds,
            gossip_mode: GossipMode::Deterministic,
            weight_by_shard_size: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_gossip_rounds(mut self, rounds: usize) -> Self {
        self.gossip_rounds = rounds;
        self
    }

    pub fn with_gossip_mode(mut self, mode: GossipMode) -> Self {
        self.gossip_mode = mode;
        self
    }

    pub fn with_weight_by_shard_size(mut self, on: bool) -> Self {
        self.weight_by_shard_size = on;
        self
    }

    /// Replaces the mixing matrix; it must respect the topology's edges.
    pub fn with_mixing(mut self, mixing: MixingMatrix) -> Result<Self> {
        mixing.check_support(&self.topology)?;
        self.mixing = mixing;
        Ok(self)
    }

    pub fn nodes(&self) -> usize {
        self.topology.nodes()
    }

    pub fn validate(&self) -> Result<()> {
        self.hp.validate()?;
        if self.gossip_rounds == 0 {
            return Err(Error::param("gossip_rounds", "must be at least 1"));
        }
        if !self.topology.is_connected() {
            return Err(Error::Disconnected);
        }
        self.mixing.check_support(&self.topology)
    }
}

/// Everything one simulated site holds.
#[derive(Debug, Clone)]
pub struct NodeState {
    node_id: usize,
    shard: Shard,
    /// Local weights at the start of the current iteration.
    pub w_hat: DenseVector,
    /// Result of the last local half-step, before gossip.
    pub w_tilde: DenseVector,
    /// `||w_hat(t+1) - w_hat(t)||` of the last iteration; `None` before the first.
    pub last_delta: Option<f64>,
    rng: StreamRng,
    w_sum: DenseVector,
    iterations: usize,
}

impl NodeState {
    pub fn new(shard: Shard, seed: u64) -> Self {
        let node_id = shard.node_id();
        let d = shard.dim();
        NodeState {
            node_id,
            shard,
            w_hat: DenseVector::zeros(d),
            w_tilde: DenseVector::zeros(d),
            last_delta: None,
            rng: rng::sampling_stream(seed, node_id),
            w_sum: DenseVector::zeros(d),
            iterations: 0,
        }
    }

    pub fn node_id(&self) -> usize {
        self.node_id
    }

    pub fn shard(&self) -> &Shard {
        &self.shard
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Mean of `w_hat(1) .. w_hat(T)` over the iterations run so far.
    pub fn average(&self) -> DenseVector {
        if self.iterations == 0 {
            self.w_hat.clone()
        } else {
            self.w_sum.divided(self.iterations as f64)
        }
    }
}

/// Builds one state per shard; shard `i` must belong to node `i`.
pub fn init_states(shards: Vec<Shard>, cfg: &GadgetConfig) -> Result<Vec<NodeState>> {
    if shards.len() != cfg.nodes() {
        return Err(Error::ShardCountMismatch { shards: shards.len(), nodes: cfg.nodes() });
    }
    let d = shards.first().map_or(0, Shard::dim);
    for (i, s) in shards.iter().enumerate() {
        if s.node_id() != i {
            return Err(Error::param("shards", "shard i must belong to node i"));
        }
        if s.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
        }
    }
    Ok(shards.into_iter().map(|s| NodeState::new(s, cfg.hp.seed)).collect())
}

/// Protocol weights `n_i * m / N`.
fn shard_weights(states: &[NodeState]) -> Vec<f64> {
    let m = states.len();
    let total: usize = states.iter().map(|s| s.shard.len()).sum();
    states.iter().map(|s| (s.shard.len() * m) as f64 / total as f64).collect()
}

/// The gossip engine a run uses, built from `cfg`.
pub fn gossip_engine(cfg: &GadgetConfig) -> PushSum {
    PushSum::new(cfg.mixing.clone(), cfg.gossip_mode, cfg.hp.seed)
}

/// Runs iteration `t` at every node and returns the gossip accuracy report.
pub fn gadget_iteration<E: Executor>(
    states: &mut [NodeState],
    cfg: &GadgetConfig,
    t: usize,
    gossip: &mut PushSum,
    exec: &E,
) -> Result<GossipReport> {
    if t == 0 {
        return Err(Error::param("t", "iterations count from 1"));
    }
    if states.len() != cfg.nodes() {
        return Err(Error::ShardCountMismatch { shards: states.len(), nodes: cfg.nodes() });
    }
    let hp = &cfg.hp;

    exec.for_each_node(states, |_, s| {
        s.w_sum.add_assign(&s.w_hat).expect("weights share the shard dimension");
        s.iterations += 1;
        let mut w = svm::local_step(&s.w_hat, s.shard.instances(), hp, t, &mut s.rng);
        if hp.project_pre_gossip {
            w = svm::project_to_ball(&w, hp.lambda);
        }
        s.w_tilde = w;
    });

    let payload: Vec<DenseVector> = states.iter().map(|s| s.w_tilde.clone()).collect();
    let weights = cfg.weight_by_shard_size.then(|| shard_weights(states));
    let outcome = gossip.push_vector(&payload, weights.as_deref(), cfg.gossip_rounds, exec)?;

    for (s, estimate) in states.iter_mut().zip(outcome.estimates) {
        let next = if hp.project_post_gossip { svm::project_to_ball(&estimate, hp.lambda) } else { estimate };
        s.last_delta = Some(next.distance(&s.w_hat)?);
        s.w_hat = next;
    }
    Ok(outcome.report)
}

/// True iff every node's last weight change is strictly below `epsilon`.
pub fn check_convergence(states: &[NodeState], epsilon: f64) -> Result<bool> {
    let mut all_below = true;
    for s in states {
        let delta = s.last_delta.ok_or(Error::NotStarted)?;
        all_below &= delta < epsilon;
    }
    if states.is_empty() {
        return Err(Error::NotStarted);
    }
    Ok(all_below)
}

/// `max_{i,j} ||w_i - w_j||`.
pub fn max_pairwise_distance(weights: &[&DenseVector]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in weights.iter().enumerate() {
        for b in &weights[i + 1..] {
            worst = worst.max(a.distance(b).expect("weights share one dimension"));
        }
    }
    worst
}

/// Metrics recorded at one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    /// Primal objective of each node's weights on its own training shard.
    pub node_objectives: Vec<f64>,
    pub mean_objective: f64,
    /// Each node's 0-1 error on its own test shard, when test shards were given.
    pub node_test_errors: Option<Vec<f64>>,
    pub mean_test_error: Option<f64>,
    pub max_delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GadgetOutcome {
    pub node_models: Vec<Model>,
    /// `sum n_i w_i / N`, assembled centrally for reporting.
    pub average_model: Model,
    pub trace: Vec<TraceRow>,
    pub iterations: usize,
    /// Whether the epsilon rule stopped the run before the iteration cap.
    pub converged: bool,
    pub max_delta_at_stop: f64,
    pub mean_delta_at_stop: f64,
    /// Largest gossip relative error seen over the run.
    pub gossip_max_relative_error: f64,
}

/// Distributed training with sequential execution and no test shards.
pub fn gadget_train(shards: Vec<Shard>, cfg: &GadgetConfig) -> Result<GadgetOutcome> {
    gadget_train_with(shards, None, cfg, &Sequential, |_, _| {})
}

/// Distributed training. `observer(t, states)` runs after every iteration.
/// `test`, when given, holds node `i`'s test shard at index `i`.
pub fn gadget_train_with<E, F>(
    shards: Vec<Shard>,
    test: Option<&[Shard]>,
    cfg: &GadgetConfig,
    exec: &E,
    mut observer: F,
) -> Result<GadgetOutcome>
where
    E: Executor,
    F: FnMut(usize, &[NodeState]),
{
    cfg.validate()?;
    let mut states = init_states(shards, cfg)?;
    let d = states[0].w_hat.len();
    for s in &states {
        svm::check_instances_fit(s.shard.instances(), d)?;
    }
    if let Some(test) = test {
        if test.len() != states.len() {
            return Err(Error::ShardCountMismatch { shards: test.len(), nodes: states.len() });
        }
        for shard in test {
            svm::check_instances_fit(shard.instances(), d)?;
        }
    }

    let hp = &cfg.hp;
    let cadence = hp.trace_cadence();
    let mut gossip = gossip_engine(cfg);
    let mut trace = Vec::new();
    let mut calm = 0;
    let mut converged = false;
    let mut gamma = 0.0f64;
    let mut done = 0;

    for t in 1..=hp.iterations {
        let report = gadget_iteration(&mut states, cfg, t, &mut gossip, exec)?;
        gamma = gamma.max(report.max_relative_error);
        done = t;
        observer(t, &states);

        calm = if check_convergence(&states, hp.epsilon)? { calm + 1 } else { 0 };
        converged = calm >= hp.patience;
        if t % cadence == 0 || converged || t == hp.iterations {
            trace.push(trace_row(&mut states, test, hp, t, exec)?);
        }
        if converged {
            break;
        }
    }

    let deltas: Vec<f64> = states.iter().map(|s| s.last_delta.unwrap_or(f64::INFINITY)).collect();
    let max_delta = deltas.iter().copied().fold(0.0, f64::max);
    let mean_delta = deltas.iter().sum::<f64>() / deltas.len() as f64;

    let total: usize = states.iter().map(|s| s.shard.len()).sum();
    let mut avg = DenseVector::zeros(d);
    let mut avg_of_averages = DenseVector::zeros(d);
    for s in &states {
        let share = s.shard.len() as f64 / total as f64;
        avg.add_scaled(share, &s.w_hat)?;
        avg_of_averages.add_scaled(share, &s.average())?;
    }

    let node_models = states
        .iter()
        .map(|s| Model { w: s.w_hat.clone(), average: s.average(), hp: hp.clone(), iterations: done })
        .collect();
    Ok(GadgetOutcome {
        node_models,
        average_model: Model { w: avg, average: avg_of_averages, hp: hp.clone(), iterations: done },
        trace,
        iterations: done,
        converged,
        max_delta_at_stop: max_delta,
        mean_delta_at_stop: mean_delta,
        gossip_max_relative_error: gamma,
    })
}

fn trace_row<E: Executor>(
    states: &mut [NodeState],
    test: Option<&[Shard]>,
    hp: &HyperParams,
    t: usize,
    exec: &E,
) -> Result<TraceRow> {
    let metrics = exec.for_each_node(states, |i, s| -> Result<(f64, Option<f64>)> {
        let objective = svm::primal_objective(&s.w_hat, s.shard.instances(), hp.lambda)?;
        let test_error = match test {
            Some(test) => Some(svm::zero_one_error(&s.w_hat, test[i].instances())?),
            None => None,
        };
        Ok((objective, test_error))
    });
    let metrics = metrics.into_iter().collect::<Result<Vec<_>>>()?;
    let m = metrics.len() as f64;
    let node_objectives: Vec<f64> = metrics.iter().map(|p| p.0).collect();
    let node_test_errors: Option<Vec<f64>> = metrics.iter().map(|p| p.1).collect();
    Ok(TraceRow {
        t,
        mean_objective: node_objectives.iter().sum::<f64>() / m,
        mean_test_error: node_test_errors.as_ref().map(|e| e.iter().sum::<f64>() / m),
        node_objectives,
        node_test_errors,
        max_delta: states.iter().map(|s| s.last_delta.unwrap_or(f64::INFINITY)).fold(0.0, f64::max),
    })
}
