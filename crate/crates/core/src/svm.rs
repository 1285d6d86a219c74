//! Linear SVM primitives and the centralized Pegasos trainer.
//!
//! The classifier is homogeneous, `f(x) = <w, x>`, with no bias term. Append a
//! constant feature to the data when an offset is needed.

use alloc::vec::Vec;

use rand::Rng;

use crate::data::{Dataset, Label, LabeledInstance};
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};
use crate::vector::{self, l2_norm, DenseVector};

/// How the loss term of a step is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossMode {
    /// One uniformly sampled local instance, used only if it violates the margin.
    #[default]
    Sample,
    /// `(1/n) * sum of y*x` over every local instance violating the margin:
    /// the exact sub-gradient of the local mean hinge loss.
    ViolatingSetMean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams {
    /// Regularization strength, `> 0`.
    pub lambda: f64,
    /// Iteration cap `T`, `>= 1`.
    pub iterations: usize,
    /// Stop once `||w(t+1) - w(t)||` stays below this for `patience` iterations.
    /// Zero never stops early.
    pub epsilon: f64,
    pub patience: usize,
    /// Project the local step onto the `1/sqrt(lambda)` ball before gossip.
    pub project_pre_gossip: bool,
    /// Project the gossip estimate onto the ball.
    pub project_post_gossip: bool,
    pub seed: u64,
    pub loss_mode: LossMode,
    /// Trace cadence; `None` means every `max(1, T/200)` iterations.
    pub trace_every: Option<usize>,
}

impl HyperParams {
    pub fn new(lambda: f64, iterations: usize) -> Result<Self> {
        let hp = HyperParams {
            lambda,
            iterations,
            epsilon: 1e-3,
            patience: 1,
            project_pre_gossip: false,
            project_post_gossip: true,
            seed: 0,
            loss_mode: LossMode::Sample,
            trace_every: None,
        };
        hp.validate()?;
        Ok(hp)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_projection(mut self, pre_gossip: bool, post_gossip: bool) -> Self {
        self.project_pre_gossip = pre_gossip;
        self.project_post_gossip = post_gossip;
        self
    }

    pub fn with_loss_mode(mut self, mode: LossMode) -> Self {
        self.loss_mode = mode;
        self
    }

    pub fn with_trace_every(mut self, every: usize) -> Self {
        self.trace_every = Some(every);
        self
    }

    pub fn with_patience(mut self, patience: usize) -> Self {
        self.patience = patience;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::param("lambda", "must be positive and finite"));
        }
        if self.iterations == 0 {
            return Err(Error::param("iterations", "must be at least 1"));
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(Error::param("epsilon", "must be nonnegative"));
        }
        if self.patience == 0 {
            return Err(Error::param("patience", "must be at least 1"));
        }
        if self.trace_every == Some(0) {
            return Err(Error::param("trace_every", "must be at least 1"));
        }
        Ok(())
    }

    pub fn trace_cadence(&self) -> usize {
        self.trace_every.unwrap_or_else(|| (self.iterations / 200).max(1))
    }

    /// `1/sqrt(lambda)`, the radius every projected iterate lives in.
    pub fn radius(&self) -> f64 {
        1.0 / libm::sqrt(self.lambda)
    }
}

/// A trained homogeneous linear classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    /// Final iterate.
    pub w: DenseVector,
    /// Mean of the iterates `w(1) .. w(T)` seen at the start of each iteration.
    pub average: DenseVector,
    pub hp: HyperParams,
    /// Iterations completed.
    pub iterations: usize,
}

impl Model {
    pub fn predict(&self, x: &vector::SparseVector) -> Result<Label> {
        Ok(Label::from_score(vector::dot(x, &self.w)?))
    }
}

/// `max(0, 1 - y <w, x>)`.
pub fn hinge_loss(w: &DenseVector, inst: &LabeledInstance) -> Result<f64> {
    let margin = inst.y.sign() * vector::dot(&inst.x, w)?;
    Ok((1.0 - margin).max(0.0))
}

pub fn mean_hinge_loss(w: &DenseVector, instances: &[LabeledInstance]) -> Result<f64> {
    if instances.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut total = 0.0;
    for inst in instances {
        total += hinge_loss(w, inst)?;
    }
    Ok(total / instances.len() as f64)
}

/// `(lambda/2) ||w||^2 + mean hinge loss`.
pub fn primal_objective(w: &DenseVector, instances: &[LabeledInstance], lambda: f64) -> Result<f64> {
    let norm = l2_norm(w);
    Ok(0.5 * lambda * norm * norm + mean_hinge_loss(w, instances)?)
}

/// Fraction of instances whose predicted sign differs from the label.
pub fn zero_one_error(w: &DenseVector, instances: &[LabeledInstance]) -> Result<f64> {
    if instances.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut wrong = 0usize;
    for inst in instances {
        if Label::from_score(vector::dot(&inst.x, w)?) != inst.y {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / instances.len() as f64)
}

/// One Pegasos step with step size `1/(lambda t)` on a single instance:
/// `(1 - 1/t) w + y x / (lambda t)` if the instance violates the margin,
/// `(1 - 1/t) w` otherwise.
pub fn subgradient_step(w: &DenseVector, inst: &LabeledInstance, lambda: f64, t: usize) -> Result<DenseVector> {
    if t == 0 {
        return Err(Error::param("t", "iterations count from 1"));
    }
    let margin = inst.y.sign() * vector::dot(&inst.x, w)?;
    let shrink = 1.0 - 1.0 / t as f64;
    if margin < 1.0 {
        let step = step_size(lambda, t);
        vector::scale_add(shrink, w, inst.y.sign() * step, &inst.x)
    } else {
        Ok(w.scaled(shrink))
    }
}

fn step_size(lambda: f64, t: usize) -> f64 {
    1.0 / (lambda * t as f64)
}

/// Scales `w` onto the ball of radius `1/sqrt(lambda)` when it lies outside.
///
/// The result's computed norm never exceeds the radius, so projecting twice
/// returns the same bits.
pub fn project_to_ball(w: &DenseVector, lambda: f64) -> DenseVector {
    let radius = 1.0 / libm::sqrt(lambda);
    let norm = l2_norm(w);
    if norm <= radius {
        return w.clone();
    }
    let mut factor = radius / norm;
    loop {
        let out = w.scaled(factor);
        if l2_norm(&out) <= radius {
            return out;
        }
        factor = factor.next_down();
    }
}

/// The local descent half-step shared by the centralized and distributed loops.
/// `instances` must already be dimension-checked against `w`.
pub(crate) fn local_step(
    w: &DenseVector,
    instances: &[LabeledInstance],
    hp: &HyperParams,
    t: usize,
    rng: &mut StreamRng,
) -> DenseVector {
    let shrink = 1.0 - 1.0 / t as f64;
    let step = step_size(hp.lambda, t);
    match hp.loss_mode {
        LossMode::Sample => {
            let inst = &instances[rng.gen_range(0..instances.len())];
            let y = inst.y.sign();
            if y * vector::dot_unchecked(&inst.x, w) < 1.0 {
                let mut out = w.scaled(shrink);
                let slots = out.as_mut_slice();
                for &(i, v) in inst.x.entries() {
                    slots[i as usize - 1] += y * step * v;
                }
                out
            } else {
                w.scaled(shrink)
            }
        }
        LossMode::ViolatingSetMean => {
            let mut direction = alloc::vec![0.0; w.len()];
            for inst in instances {
                let y = inst.y.sign();
                if y * vector::dot_unchecked(&inst.x, w) < 1.0 {
                    for &(i, v) in inst.x.entries() {
                        direction[i as usize - 1] += y * v;
                    }
                }
            }
            let n = instances.len() as f64;
            let mut out = w.scaled(shrink);
            for (o, d) in out.as_mut_slice().iter_mut().zip(&direction) {
                *o += step * (d / n);
            }
            out
        }
    }
}

pub(crate) fn check_instances_fit(instances: &[LabeledInstance], dim: usize) -> Result<()> {
    match instances.iter().find(|i| i.x.dim() > dim) {
        Some(bad) => Err(Error::DimensionMismatch { expected: dim, found: bad.x.dim() }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PegasosTracePoint {
    pub t: usize,
    pub objective: f64,
    pub train_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PegasosOutcome {
    pub model: Model,
    pub trace: Vec<PegasosTracePoint>,
    /// Whether the epsilon rule fired before the iteration cap.
    pub converged: bool,
    pub last_delta: f64,
}

/// Centralized Pegasos over the whole dataset.
pub fn pegasos_train(ds: &Dataset, hp: &HyperParams) -> Result<PegasosOutcome> {
    pegasos_train_observed(ds, hp, |_, _| {})
}

/// Like [`pegasos_train`], calling `observer(t, w(t+1))` after every iteration.
pub fn pegasos_train_observed<F>(ds: &Dataset, hp: &HyperParams, mut observer: F) -> Result<PegasosOutcome>
where
    F: FnMut(usize, &DenseVector),
{
    hp.validate()?;
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let instances = ds.instances();
    check_instances_fit(instances, ds.dim())?;

    let mut rng = rng::sampling_stream(hp.seed, 0);
    let project = hp.project_pre_gossip || hp.project_post_gossip;
    let cadence = hp.trace_cadence();
    let mut w = DenseVector::zeros(ds.dim());
    let mut sum = DenseVector::zeros(ds.dim());
    let mut trace = Vec::new();
    let mut calm = 0;
    let mut converged = false;
    let mut last_delta = f64::INFINITY;
    let mut done = 0;

    for t in 1..=hp.iterations {
        sum.add_assign(&w)?;
        let mut next = local_step(&w, instances, hp, t, &mut rng);
        if project {
            next = project_to_ball(&next, hp.lambda);
        }
        last_delta = next.distance(&w)?;
        w = next;
        done = t;
        observer(t, &w);

        calm = if last_delta < hp.epsilon { calm + 1 } else { 0 };
        converged = calm >= hp.patience;
        if t % cadence == 0 || converged || t == hp.iterations {
            trace.push(PegasosTracePoint {
                t,
                objective: primal_objective(&w, instances, hp.lambda)?,
                train_error: zero_one_error(&w, instances)?,
            });
        }
        if converged {
            break;
        }
    }

    let average = sum.divided(done as f64);
    Ok(PegasosOutcome {
        model: Model { w, average, hp: hp.clone(), iterations: done },
        trace,
        converged,
        last_delta,
    })
}
