//! Regret bound, speedup and cross-trial aggregation.

use alloc::vec::Vec;

use crate::data::{Dataset, LabeledInstance};
use crate::error::{Error, Result};

/// `R = max_i ||x_i||` over a dataset.
pub fn data_radius(ds: &Dataset) -> Result<f64> {
    instance_radius(ds.instances())
}

/// `R = max_i ||x_i||` over any nonempty instance slice.
pub fn instance_radius(instances: &[LabeledInstance]) -> Result<f64> {
    if instances.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(instances.iter().map(|inst| inst.x.norm()).fold(0.0, f64::max))
}

/// Bound on the subgradient norm inside the `1/sqrt(lambda)` ball: `sqrt(lambda) + R`.
pub fn subgradient_bound_estimate(lambda: f64, radius: f64) -> f64 {
    libm::sqrt(lambda) + radius
}

/// Validated inputs to [`regret_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub lambda: f64,
    pub iterations: usize,
    /// Subgradient norm bound `c`.
    pub c: f64,
    /// Data radius `R`.
    pub radius: f64,
    /// Gossip relative accuracy.
    pub gamma: f64,
}

impl BoundInputs {
    pub fn new(lambda: f64, iterations: usize, c: f64, radius: f64, gamma: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", "must be positive and finite"));
        }
        if iterations == 0 {
            return Err(Error::param("iterations", "must be at least 1"));
        }
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::param("c", "must be nonnegative and finite"));
        }
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::param("radius", "must be nonnegative and finite"));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::param("gamma", "must be in [0, 1)"));
        }
        Ok(BoundInputs { lambda, iterations, c, radius, gamma })
    }
}

/// Average-regret bound
/// `2c/sqrt(l) + c^2 ln T / (2 T l) + (2/sqrt(l)) (gamma R / sqrt(l) + gamma R)`.
pub fn regret_bound(b: &BoundInputs) -> f64 {
    let sl = libm::sqrt(b.lambda);
    let t = b.iterations as f64;
    let gossip = b.gamma * b.radius / sl + b.gamma * b.radius;
    2.0 * b.c / sl + b.c * b.c * libm::log(t) / (2.0 * t * b.lambda) + 2.0 / sl * gossip
}

/// `t_distributed / t_centralized`.
pub fn speedup(t_distributed: f64, t_centralized: f64) -> Result<f64> {
    if !(t_distributed > 0.0 && t_distributed.is_finite()) {
        return Err(Error::param("t_distributed", "must be positive and finite"));
    }
    if !(t_centralized > 0.0 && t_centralized.is_finite()) {
        return Err(Error::param("t_centralized", "must be positive and finite"));
    }
    Ok(t_distributed / t_centralized)
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance (`n - 1` denominator); zero for fewer than two values.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mu = mean(xs);
    xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Mean and spread of a metric measured at every node in every trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSummary {
    pub mean: f64,
    /// `sqrt(Var(Nodes) + Var(Trials))`.
    pub std: f64,
    /// Mean over trials of the variance across nodes.
    pub var_nodes: f64,
    /// Variance across trials of the per-trial node mean.
    pub var_trials: f64,
}

/// Aggregates `values[trial][node]`.
pub fn aggregate_trials(values: &[Vec<f64>]) -> Result<TrialSummary> {
    if values.is_empty() || values.iter().any(|v| v.is_empty()) {
        return Err(Error::param("values", "need at least one trial with one node"));
    }
    let trial_means: Vec<f64> = values.iter().map(|v| mean(v)).collect();
    let node_vars: Vec<f64> = values.iter().map(|v| sample_variance(v)).collect();
    let var_nodes = mean(&node_vars);
    let var_trials = sample_variance(&trial_means);
    Ok(TrialSummary { mean: mean(&trial_means), std: libm::sqrt(var_nodes + var_trials), var_nodes, var_trials })
}
