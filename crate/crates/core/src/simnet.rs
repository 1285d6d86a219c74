//! Synchronous round-driven network simulation.
//!
//! Each round, every node runs its step function once against the messages
//! delivered to it at the previous barrier, and everything it sends is held
//! until the next barrier. Links are lossless with zero delay. Inboxes are kept
//! in ascending source order, so accumulation order never depends on how node
//! steps were scheduled.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::vector::{l2_norm, DenseVector};

/// Runs per-node work, possibly in parallel. Implementations must return
/// results in node order.
pub trait Executor: Sync {
    fn for_each_node<S, T, F>(&self, nodes: &mut [S], f: F) -> Vec<T>
    where
        S: Send,
        T: Send,
        F: Fn(usize, &mut S) -> T + Sync;
}

/// Runs nodes one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn for_each_node<S, T, F>(&self, nodes: &mut [S], f: F) -> Vec<T>
    where
        S: Send,
        T: Send,
        F: Fn(usize, &mut S) -> T + Sync,
    {
        nodes.iter_mut().enumerate().map(|(i, s)| f(i, s)).collect()
    }
}

/// A push-sum share in flight.
#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub src: usize,
    pub dst: usize,
    /// Round in which the message was sent.
    pub round: u64,
    pub payload: DenseVector,
    pub weight: f64,
}

/// What a step function hands to the scheduler; the source is implied.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub dst: usize,
    pub payload: DenseVector,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogEntry {
    pub round: u64,
    pub src: usize,
    pub dst: usize,
    pub payload_norm: f64,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct RoundScheduler {
    round: u64,
    links: Vec<Vec<usize>>,
    inboxes: Vec<Vec<Message>>,
    log: Option<Vec<LogEntry>>,
    delivered: u64,
}

impl RoundScheduler {
    /// `links[i]` lists the peers node `i` may address besides itself.
    pub fn new(mut links: Vec<Vec<usize>>) -> Self {
        for l in &mut links {
            l.sort_unstable();
            l.dedup();
        }
        let m = links.len();
        RoundScheduler {
            round: 1,
            links,
            inboxes: (0..m).map(|_| Vec::new()).collect(),
            log: None,
            delivered: 0,
        }
    }

    pub fn with_logging(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn nodes(&self) -> usize {
        self.links.len()
    }

    /// The round the next [`run_round`](Self::run_round) call executes.
    pub fn round(&self) -> u64 {
        self.round
    }

    /// Messages delivered across all barriers so far.
    pub fn delivered(&self) -> u64 {
        self.delivered
    }

    pub fn inbox(&self, node: usize) -> &[Message] {
        &self.inboxes[node]
    }

    /// Places a message in `dst`'s inbox as if it had been sent in the previous
    /// round. Used to seed protocol state before the first round.
    pub fn inject(&mut self, src: usize, dst: usize, payload: DenseVector, weight: f64) -> Result<()> {
        self.check_link(src, dst)?;
        let round = self.round - 1;
        self.record(round, src, dst, &payload, weight);
        let inbox = &mut self.inboxes[dst];
        let at = inbox.partition_point(|m| m.src <= src);
        inbox.insert(at, Message { src, dst, round, payload, weight });
        self.delivered += 1;
        Ok(())
    }

    /// Runs one round: every node's `step` sees its inbox, the produced
    /// messages are validated and delivered, and the round counter advances.
    /// A message to a non-neighbor aborts the round before anything is
    /// delivered.
    pub fn run_round<S, E, F>(&mut self, nodes: &mut [S], exec: &E, step: F) -> Result<()>
    where
        S: Send,
        E: Executor,
        F: Fn(usize, &mut S, &[Message]) -> Vec<Envelope> + Sync,
    {
        assert_eq!(nodes.len(), self.nodes(), "one state per simulated node");
        let inboxes = &self.inboxes;
        let outgoing = exec.for_each_node(nodes, |i, s| step(i, s, &inboxes[i]));

        for (src, batch) in outgoing.iter().enumerate() {
            for env in batch {
                self.check_link(src, env.dst)?;
            }
        }

        let round = self.round;
        let mut next: Vec<Vec<Message>> = (0..self.nodes()).map(|_| Vec::new()).collect();
        let mut entries = Vec::new();
        let mut sent = 0u64;
        for (src, batch) in outgoing.into_iter().enumerate() {
            let start = entries.len();
            for env in batch {
                if self.log.is_some() {
                    entries.push(LogEntry {
                        round,
                        src,
                        dst: env.dst,
                        payload_norm: l2_norm(&env.payload),
                        weight: env.weight,
                    });
                }
                next[env.dst].push(Message { src, dst: env.dst, round, payload: env.payload, weight: env.weight });
                sent += 1;
            }
            entries[start..].sort_by_key(|e| e.dst);
        }
        if let Some(log) = &mut self.log {
            log.extend(entries);
        }
        debug_assert_eq!(sent, next.iter().map(|b| b.len() as u64).sum::<u64>());
        self.inboxes = next;
        self.delivered += sent;
        self.round += 1;
        Ok(())
    }

    /// Empties every inbox, returning them in node order.
    pub fn drain_inboxes(&mut self) -> Vec<Vec<Message>> {
        let m = self.nodes();
        core::mem::replace(&mut self.inboxes, (0..m).map(|_| Vec::new()).collect())
    }

    /// Every logged message ordered by (round, src, dst); `None` unless
    /// logging was enabled.
    pub fn message_log(&self) -> Option<&[LogEntry]> {
        self.log.as_deref()
    }

    fn check_link(&self, src: usize, dst: usize) -> Result<()> {
        let m = self.nodes();
        let ok = src < m && dst < m && (src == dst || self.links[src].binary_search(&dst).is_ok());
        if ok {
            Ok(())
        } else {
            Err(Error::SimulationFault { round: self.round, src, dst })
        }
    }

    fn record(&mut self, round: u64, src: usize, dst: usize, payload: &DenseVector, weight: f64) {
        if let Some(log) = &mut self.log {
            let entry = LogEntry { round, src, dst, payload_norm: l2_norm(payload), weight };
            let at = log.partition_point(|e| (e.round, e.src, e.dst) <= (round, src, dst));
            log.insert(at, entry);
        }
    }
}
