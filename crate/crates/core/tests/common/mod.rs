#![allow(dead_code)]

use gadget_core::{Dataset, Label, LabeledInstance, SparseVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A sparse vector of dimension `dim` with nonzero entries in `[-5, 5]`.
pub fn sparse(dim: usize) -> impl Strategy<Value = SparseVector> {
    proptest::collection::btree_map(1..=dim as u32, (-5.0f64..5.0).prop_filter("nonzero", |v| *v != 0.0), 0..=dim)
        .prop_map(move |m| SparseVector::new(m.into_iter().collect(), dim).unwrap())
}

pub fn dense(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-5.0f64..5.0, dim)
}

pub fn label() -> impl Strategy<Value = Label> {
    prop_oneof![Just(Label::Positive), Just(Label::Negative)]
}

pub fn instance(dim: usize) -> impl Strategy<Value = LabeledInstance> {
    (sparse(dim), label()).prop_map(|(x, y)| LabeledInstance::new(x, y))
}

/// `n` points in `d` dimensions labelled by a fixed hyperplane, at least
/// `margin` away from it.
pub fn separable(n: usize, d: usize, margin: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal: Vec<f64> = (0..d).map(|k| if k == 0 { 1.0 } else { 0.5 / d as f64 }).collect();
    let norm = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut instances = Vec::with_capacity(n);
    while instances.len() < n {
        let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let score = p.iter().zip(&normal).map(|(a, b)| a * b).sum::<f64>() / norm;
        if score.abs() < margin {
            continue;
        }
        let entries = p.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(k, v)| (k as u32 + 1, *v)).collect();
        let y = if score > 0.0 { Label::Positive } else { Label::Negative };
        instances.push(LabeledInstance::new(SparseVector::new(entries, d).unwrap(), y));
    }
    Dataset::new("separable", instances, Some(d)).unwrap()
}

/// Noisy linearly labelled points.
pub fn noisy(n: usize, d: usize, flip: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let instances = (0..n)
        .map(|_| {
            let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut y = if p[0] + 0.3 * p[1 % d] > 0.0 { Label::Positive } else { Label::Negative };
            if rng.gen::<f64>() < flip {
                y = y.flipped();
            }
            let entries = p.iter().enumerate().map(|(k, v)| (k as u32 + 1, *v)).filter(|e| e.1 != 0.0).collect();
            LabeledInstance::new(SparseVector::new(entries, d).unwrap(), y)
        })
        .collect();
    Dataset::new("noisy", instances, Some(d)).unwrap()
}
