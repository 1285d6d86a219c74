//! Benchmark data lookup and synthetic stand-ins for the acceptance suite.

use std::env;
use std::path::{Path, PathBuf};

use gadget_core::{Dataset, Label, LabeledInstance, SparseVector};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Environment variable naming the benchmark data directory.
pub const DATA_DIR_VAR: &str = "GADGET_DATA_DIR";

/// `$GADGET_DATA_DIR`, or `data/` at the workspace root.
pub fn data_dir() -> PathBuf {
    match env::var_os(DATA_DIR_VAR) {
        Some(dir) => PathBuf::from(dir),
        None => workspace_root().join("data"),
    }
}

fn workspace_root() -> &'static Path {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    crate_dir.parent().and_then(Path::parent).unwrap_or(crate_dir)
}

/// Paths of `<name>.train` and `<name>.test` in [`data_dir`], or the first
/// missing path.
pub fn locate(name: &str) -> Result<(PathBuf, PathBuf), PathBuf> {
    let dir = data_dir();
    let train = dir.join(format!("{name}.train"));
    let test = dir.join(format!("{name}.test"));
    for p in [&train, &test] {
        if !p.is_file() {
            return Err(p.clone());
        }
    }
    Ok((train, test))
}

/// Category counts of the one-hot groups in the 123-feature Adult encoding.
pub const ADULT_GROUPS: [usize; 14] = [5, 8, 5, 16, 7, 14, 6, 5, 2, 3, 2, 3, 5, 42];
pub const ADULT_DIM: usize = 123;
pub const ADULT_TRAIN: usize = 32_561;
pub const ADULT_TEST: usize = 16_281;

/// An Adult-shaped stand-in: same sizes and dimension, 14 active binary
/// features per row (one per group, drawn from skewed category frequencies),
/// about 24% positives from a hidden linear rule, and 15% label noise.
pub fn surrogate_adult(seed: u64) -> (Dataset, Dataset) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut offset = 0u32;
    let groups: Vec<(u32, WeightedIndex<f64>, Vec<f64>)> = ADULT_GROUPS
        .iter()
        .map(|&k| {
            let freq = WeightedIndex::new((0..k).map(|c| 1.0 / (c + 1) as f64)).expect("positive weights");
            let effect = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let g = (offset, freq, effect);
            offset += k as u32;
            g
        })
        .collect();

    let total = ADULT_TRAIN + ADULT_TEST;
    let mut rows = Vec::with_capacity(total);
    for _ in 0..total {
        let mut entries = Vec::with_capacity(groups.len());
        let mut score = 0.0;
        for (start, freq, effect) in &groups {
            let c = freq.sample(&mut rng);
            entries.push((start + c as u32 + 1, 1.0));
            score += effect[c];
        }
        rows.push((entries, score));
    }
    let mut scores: Vec<f64> = rows.iter().map(|r| r.1).collect();
    scores.sort_by(f64::total_cmp);
    let threshold = scores[(0.76 * total as f64) as usize];

    let instances: Vec<LabeledInstance> = rows
        .into_iter()
        .map(|(entries, score)| {
            let mut y = if score >= threshold { Label::Positive } else { Label::Negative };
            if rng.gen::<f64>() < 0.15 {
                y = y.flipped();
            }
            LabeledInstance::new(SparseVector::new(entries, ADULT_DIM).expect("sorted one-hot indices"), y)
        })
        .collect();
    let mut train = instances;
    let test = train.split_off(ADULT_TRAIN);
    (
        Dataset::new("adult-surrogate", train, Some(ADULT_DIM)).expect("nonempty"),
        Dataset::new("adult-surrogate-test", test, Some(ADULT_DIM)).expect("nonempty"),
    )
}

/// `n` points in the square `[-1, 1]^2`, labelled by the sign of `x1 + x2`
/// and kept only if their distance to that line is at least `margin`.
pub fn separable_2d(n: usize, margin: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::with_capacity(n);
    while instances.len() < n {
        let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let signed = (a + b) / std::f64::consts::SQRT_2;
        if signed.abs() < margin || a == 0.0 || b == 0.0 {
            continue;
        }
        let y = if signed > 0.0 { Label::Positive } else { Label::Negative };
        instances.push(LabeledInstance::new(SparseVector::new(vec![(1, a), (2, b)], 2).expect("valid"), y));
    }
    Dataset::new("separable-2d", instances, Some(2)).expect("nonempty")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surrogate_has_adult_shape() {
        let (train, test) = surrogate_adult(1);
        assert_eq!(ADULT_GROUPS.iter().sum::<usize>(), ADULT_DIM);
        assert_eq!((train.len(), test.len(), train.dim()), (ADULT_TRAIN, ADULT_TEST, ADULT_DIM));
        assert!(train.instances().iter().all(|i| i.x.nnz() == ADULT_GROUPS.len()));
        let pos = train.instances().iter().filter(|i| i.y == Label::Positive).count() as f64 / train.len() as f64;
        assert!((0.25..0.40).contains(&pos), "{pos}");
    }

    #[test]
    fn separable_respects_margin() {
        let ds = separable_2d(200, 0.5, 3);
        assert_eq!(ds.len(), 200);
        for inst in ds.instances() {
            let e = inst.x.entries();
            assert!(inst.y.sign() * (e[0].1 + e[1].1) / std::f64::consts::SQRT_2 >= 0.5);
        }
    }
}
