use alloc::vec::Vec;

use rand::Rng;

use super::{MixingMatrix, Topology};
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};
use crate::simnet::{Envelope, Executor, LogEntry, Message, RoundScheduler, Sequential};
use crate::vector::{l2_norm, DenseVector};

/// How each node splits its (sum, weight) pair every round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GossipMode {
    /// Node `i` sends share `b[i][j]` to every `j` with `b[i][j] > 0`, itself included.
    #[default]
    Deterministic,
    /// Node `i` keeps half and pushes half to one uniformly chosen neighbor.
    Randomized,
}

/// One node's push-sum pair. `w` is the protocol weight, not an SVM weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PushSumState {
    pub node_id: usize,
    pub v: DenseVector,
    pub w: f64,
}

impl PushSumState {
    pub fn new(node_id: usize, v: DenseVector, w: f64) -> Self {
        PushSumState { node_id, v, w }
    }

    /// `v / w`.
    pub fn estimate(&self) -> DenseVector {
        self.v.divided(self.w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GossipReport {
    pub rounds: usize,
    /// `max_i ||estimate_i - avg|| / ||avg||`, with `avg` computed centrally.
    /// Diagnostic only; nodes never see it.
    pub max_relative_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PushVectorOutcome {
    pub estimates: Vec<DenseVector>,
    pub states: Vec<PushSumState>,
    pub report: GossipReport,
}

/// Push-sum over a fixed mixing matrix, running on the round scheduler.
///
/// Randomized mode draws neighbors from per-node streams that persist across
/// calls, so a sequence of calls is reproducible from the seed.
#[derive(Debug, Clone)]
pub struct PushSum {
    matrix: MixingMatrix,
    links: Vec<Vec<usize>>,
    mode: GossipMode,
    rngs: Vec<StreamRng>,
    logging: bool,
    last_log: Vec<LogEntry>,
}

impl PushSum {
    pub fn new(matrix: MixingMatrix, mode: GossipMode, seed: u64) -> Self {
        let links = matrix.out_links();
        let rngs = (0..matrix.nodes()).map(|i| rng::gossip_stream(seed, i)).collect();
        PushSum { matrix, links, mode, rngs, logging: false, last_log: Vec::new() }
    }

    pub fn deterministic(matrix: MixingMatrix) -> Self {
        PushSum::new(matrix, GossipMode::Deterministic, 0)
    }

    /// Keep the message log of the most recent run.
    pub fn with_message_log(mut self) -> Self {
        self.logging = true;
        self
    }

    pub fn nodes(&self) -> usize {
        self.matrix.nodes()
    }

    pub fn mode(&self) -> GossipMode {
        self.mode
    }

    pub fn matrix(&self) -> &MixingMatrix {
        &self.matrix
    }

    /// Message log of the last [`run`](Self::run), empty unless enabled.
    pub fn last_message_log(&self) -> &[LogEntry] {
        &self.last_log
    }

    /// Runs `rounds` push-sum rounds starting from `states` (one per node, in
    /// node order). At time zero each node holds its own pair, as if sent to
    /// itself.
    pub fn run<E: Executor>(&mut self, states: Vec<PushSumState>, rounds: usize, exec: &E) -> Result<Vec<PushSumState>> {
        let m = self.nodes();
        if states.len() != m {
            return Err(Error::ShardCountMismatch { shards: states.len(), nodes: m });
        }
        let mut sched = RoundScheduler::new(self.links.clone());
        if self.logging {
            sched = sched.with_logging();
        }
        for (i, s) in states.into_iter().enumerate() {
            if s.node_id != i {
                return Err(Error::param("states", "must be ordered by node id"));
            }
            sched.inject(i, i, s.v, s.w)?;
        }

        let matrix = &self.matrix;
        let links = &self.links;
        let mode = self.mode;
        for _ in 0..rounds {
            sched.run_round(&mut self.rngs, exec, |i, rng, inbox| {
                let (v, w) = accumulate(inbox);
                match mode {
                    GossipMode::Deterministic => matrix
                        .row(i)
                        .iter()
                        .enumerate()
                        .filter(|(_, &b)| b > 0.0)
                        .map(|(j, &b)| Envelope { dst: j, payload: v.scaled(b), weight: w * b })
                        .collect(),
                    GossipMode::Randomized => {
                        let peers = &links[i];
                        if peers.is_empty() {
                            alloc::vec![Envelope { dst: i, payload: v, weight: w }]
                        } else {
                            let j = peers[rng.gen_range(0..peers.len())];
                            let half = v.scaled(0.5);
                            alloc::vec![
                                Envelope { dst: i, payload: half.clone(), weight: 0.5 * w },
                                Envelope { dst: j, payload: half, weight: 0.5 * w },
                            ]
                        }
                    }
                }
            })?;
        }

        if self.logging {
            self.last_log = sched.message_log().map(<[LogEntry]>::to_vec).unwrap_or_default();
        }
        Ok(sched
            .drain_inboxes()
            .iter()
            .enumerate()
            .map(|(i, inbox)| {
                let (v, w) = accumulate(inbox);
                PushSumState::new(i, v, w)
            })
            .collect())
    }

    /// Push-vector: node `i` starts from `(q_i * values[i], q_i)` with
    /// `q_i = weights[i]` (1 when `weights` is `None`), so estimates converge to
    /// `sum q_i values[i] / sum q_i`.
    pub fn push_vector<E: Executor>(
        &mut self,
        values: &[DenseVector],
        weights: Option<&[f64]>,
        rounds: usize,
        exec: &E,
    ) -> Result<PushVectorOutcome> {
        let m = self.nodes();
        if values.len() != m {
            return Err(Error::ShardCountMismatch { shards: values.len(), nodes: m });
        }
        let d = values[0].len();
        if let Some(bad) = values.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: bad.len() });
        }
        if let Some(q) = weights {
            if q.len() != m || q.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(Error::param("weights", "need one positive finite weight per node"));
            }
        }
        let weight = |i: usize| weights.map_or(1.0, |q| q[i]);

        let initial: Vec<PushSumState> = values
            .iter()
            .enumerate()
            .map(|(i, x)| match weights {
                Some(q) => PushSumState::new(i, x.scaled(q[i]), q[i]),
                None => PushSumState::new(i, x.clone(), 1.0),
            })
            .collect();

        let mut avg = DenseVector::zeros(d);
        let mut total = 0.0;
        for (i, x) in values.iter().enumerate() {
            avg.add_scaled(weight(i), x)?;
            total += weight(i);
        }
        let avg = avg.divided(total);

        let states = self.run(initial, rounds, exec)?;
        let estimates: Vec<DenseVector> = states.iter().map(PushSumState::estimate).collect();
        let max_relative_error = relative_error(&estimates, &avg)?;
        Ok(PushVectorOutcome { estimates, states, report: GossipReport { rounds, max_relative_error } })
    }
}

fn accumulate(inbox: &[Message]) -> (DenseVector, f64) {
    let (first, rest) = inbox.split_first().expect("every node receives at least its own share");
    let mut v = first.payload.clone();
    let mut w = first.weight;
    for msg in rest {
        v.add_assign(&msg.payload).expect("payloads share one length");
        w += msg.weight;
    }
    (v, w)
}

/// `max_i ||estimates[i] - target|| / ||target||`; plain distance when the
/// target is the zero vector.
pub fn relative_error(estimates: &[DenseVector], target: &DenseVector) -> Result<f64> {
    let scale = l2_norm(target);
    let mut worst = 0.0f64;
    for e in estimates {
        worst = worst.max(e.distance(target)?);
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// One deterministic push-sum round, run sequentially.
pub fn push_sum_round(states: &[PushSumState], b: &MixingMatrix) -> Result<Vec<PushSumState>> {
    PushSum::deterministic(b.clone()).run(states.to_vec(), 1, &Sequential)
}

/// Deterministic push-vector with unit weights, run sequentially.
pub fn push_vector(values: &[DenseVector], b: &MixingMatrix, rounds: usize) -> Result<PushVectorOutcome> {
    PushSum::deterministic(b.clone()).push_vector(values, None, rounds, &Sequential)
}

/// Default multiplier in [`rounds_for_accuracy`].
pub const DEFAULT_ROUNDS_FACTOR: f64 = 2.0;

/// `ceil(2 * m * ln(1/gamma))`, a conservative stand-in for
/// `O(tau_mix * log(1/gamma))` rounds.
pub fn rounds_for_accuracy(topo: &Topology, gamma: f64) -> Result<usize> {
    rounds_for_accuracy_with(topo, gamma, DEFAULT_ROUNDS_FACTOR)
}

/// `ceil(k * m * ln(1/gamma))`, at least 1.
pub fn rounds_for_accuracy_with(topo: &Topology, gamma: f64, k: f64) -> Result<usize> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::param("gamma", "must lie strictly between 0 and 1"));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::param("k", "must be positive"));
    }
    let r = libm::ceil(k * topo.nodes() as f64 * libm::log(1.0 / gamma));
    Ok((r as usize).max(1))
}

/// Smallest number of deterministic rounds after which a unit spike at node 0
/// is averaged to relative error `<= gamma`, or `None` if `max_rounds` do not
/// suffice.
pub fn measured_rounds_for_accuracy(b: &MixingMatrix, gamma: f64, max_rounds: usize) -> Result<Option<usize>> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::param("gamma", "must lie strictly between 0 and 1"));
    }
    let m = b.nodes();
    let target = DenseVector::from_vec(alloc::vec![1.0 / m as f64])?;
    let mut gossip = PushSum::deterministic(b.clone());
    let mut states: Vec<PushSumState> = (0..m)
        .map(|i| PushSumState::new(i, DenseVector::from_vec(alloc::vec![if i == 0 { 1.0 } else { 0.0 }]).unwrap(), 1.0))
        .collect();
    for r in 0..=max_rounds {
        if r > 0 {
            states = gossip.run(states, 1, &Sequential)?;
        }
        let estimates: Vec<DenseVector> = states.iter().map(PushSumState::estimate).collect();
        if relative_error(&estimates, &target)? <= gamma {
            return Ok(Some(r));
        }
    }
    Ok(None)
}
