//! Labelled instances, datasets and horizontal partitioning.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng;
use crate::vector::SparseVector;

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    /// `+1.0` or `-1.0`.
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    /// Classifier decision for a score; a score of exactly zero is positive.
    pub fn from_score(score: f64) -> Self {
        if score >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledInstance {
    pub x: SparseVector,
    pub y: Label,
}

impl LabeledInstance {
    pub fn new(x: SparseVector, y: Label) -> Self {
        LabeledInstance { x, y }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    dim: usize,
    instances: Vec<LabeledInstance>,
}

impl Dataset {
    /// Builds a dataset. `dim` defaults to the largest feature index; an
    /// explicit `dim` must cover every instance. Every instance is re-declared
    /// at the dataset dimension.
    pub fn new(name: impl Into<String>, instances: Vec<LabeledInstance>, dim: Option<usize>) -> Result<Self> {
        let max_index = instances.iter().map(|i| i.x.max_index()).max().unwrap_or(0);
        let dim = match dim {
            Some(d) if d < max_index => {
                return Err(Error::DimensionMismatch { expected: d, found: max_index })
            }
            Some(d) => d,
            None => max_index,
        };
        let instances = instances
            .into_iter()
            .map(|i| Ok(LabeledInstance::new(i.x.with_dim(dim)?, i.y)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset { name: name.into(), dim, instances })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn instances(&self) -> &[LabeledInstance] {
        &self.instances
    }

    /// The same instances declared at a larger dimension.
    pub fn with_dim(self, dim: usize) -> Result<Self> {
        let Dataset { name, instances, .. } = self;
        Dataset::new(name, instances, Some(dim))
    }
}

/// One node's horizontal slice of the data.
#[derive(Debug, Clone, PartialEq)]
pub struct Shard {
    node_id: usize,
    dim: usize,
    instances: Vec<LabeledInstance>,
}

impl Shard {
    pub fn new(node_id: usize, dim: usize, instances: Vec<LabeledInstance>) -> Result<Self> {
        if instances.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(bad) = instances.iter().find(|i| i.x.dim() > dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.x.dim() });
        }
        Ok(Shard { node_id, dim, instances })
    }

    /// The whole dataset, in its original order, as a single shard.
    pub fn whole(ds: &Dataset, node_id: usize) -> Result<Self> {
        Shard::new(node_id, ds.dim(), ds.instances().to_vec())
    }

    pub fn node_id(&self) -> usize {
        self.node_id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `n_i`.
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn instances(&self) -> &[LabeledInstance] {
        &self.instances
    }
}

/// Shuffles `ds` with a seeded stream and deals it into `m` contiguous shards.
///
/// Sizes differ by at most one; the first `N mod m` shards take the extra
/// instance.
pub fn partition(ds: &Dataset, m: usize, seed: u64) -> Result<Vec<Shard>> {
    if m == 0 {
        return Err(Error::param("nodes", "need at least one node"));
    }
    let n = ds.len();
    if n < m {
        return Err(Error::TooFewInstances { nodes: m, instances: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::partition_stream(seed));

    let base = n / m;
    let extra = n % m;
    let mut shards = Vec::with_capacity(m);
    let mut cursor = 0;
    for node in 0..m {
        let size = base + usize::from(node < extra);
        let instances = order[cursor..cursor + size].iter().map(|&k| ds.instances[k].clone()).collect();
        cursor += size;
        shards.push(Shard::new(node, ds.dim(), instances)?);
    }
    Ok(shards)
}
