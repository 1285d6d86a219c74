//! Acceptance suite. Prints one `[PASS]` or `[FAIL]` line per criterion and
//! exits nonzero if any criterion fails.
//!
//! Criteria that name Adult use the real files when `GADGET_DATA_DIR` holds
//! them and an Adult-shaped synthetic stand-in otherwise; their lines say
//! which. The accuracy reproduction has no stand-in.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gadget::config::{Command, ExperimentConfig};
use gadget::exec::PoolExecutor;
use gadget::experiment::{run_experiment, Outcome};
use gadget::libsvm::{load_dataset, write_dataset};
use gadget_core::eval::{instance_radius, regret_bound, subgradient_bound_estimate, BoundInputs};
use gadget_core::gadget::{gadget_train_with, max_pairwise_distance};
use gadget_core::gossip::{build_metropolis_matrix, relative_error, PushSum, PushSumState};
use gadget_core::svm::{mean_hinge_loss, pegasos_train, pegasos_train_observed, primal_objective};
use gadget_core::{
    partition, rounds_for_accuracy, Dataset, DenseVector, GadgetConfig, HyperParams, Sequential, Shard, Topology,
};
use gadget_validation::{locate, separable_2d, surrogate_adult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ADULT_LAMBDA: f64 = 3.07e-5;

const C1_GRAPHS: usize = 50;
const C1_MAX_NODES: usize = 20;
const C1_GAMMA: f64 = 1e-6;
const C1_MASS_TOL: f64 = 1e-9;
const C1_BUDGET: Duration = Duration::from_secs(10);

const C2_ITERS: usize = 10_000;
const C2_SEEDS: [u64; 3] = [1, 2, 3];
const C2_BUDGET: Duration = Duration::from_secs(30);

/// `(name, GADGET target %, Pegasos target %)`.
const C3_TARGETS: [(&str, f64, f64); 3] = [("adult", 77.04, 68.79), ("reuters", 94.04, 95.59), ("usps", 92.12, 92.33)];
const C3_TOLERANCE_PTS: f64 = 3.0;
const C3_ITERATION_CAP: usize = 20_000;
const C3_TRIALS: usize = 5;
const C3_BUDGET: Duration = Duration::from_secs(600);

const C4_LAMBDA: f64 = 0.1;
const C4_MARGIN: f64 = 0.5;
const C4_POINTS: usize = 200;
const C4_NODES: usize = 5;
const C4_HORIZONS: [usize; 2] = [1_000, 10_000];
const C4_ORACLE_ITERS: usize = 1_000_000;
const C4_BUDGET: Duration = Duration::from_secs(60);

const C5_PAIRS: usize = 1000;
/// Relative slack for rounding in the two mean losses.
const C5_SLACK: f64 = 1e-12;
const C5_BUDGET: Duration = Duration::from_secs(60);

const C6_NODES: usize = 10;
const C6_ITERS: usize = 2_000;
const C6_ROUNDS: (usize, usize) = (4, 16);
const C6_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
const C6_BUDGET: Duration = Duration::from_secs(300);

const C7_ITERS: &str = "1500";
const C7_WORKERS: [&str; 3] = ["1", "1", "4"];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

type Check = fn(&Adult) -> Verdict;

/// Adult, real or stand-in, with a label for the report.
struct Adult {
    train: Dataset,
    test: Dataset,
    source: &'static str,
}

fn load_adult() -> Adult {
    if let Ok((train, test)) = locate("adult") {
        if let (Ok(tr), Ok(te)) = (load_dataset(&train, None), load_dataset(&test, None)) {
            let dim = tr.dim().max(te.dim());
            return Adult {
                train: tr.with_dim(dim).expect("dimension grows"),
                test: te.with_dim(dim).expect("dimension grows"),
                source: "Adult",
            };
        }
    }
    let (train, test) = surrogate_adult(2024);
    Adult { train, test, source: "SURROGATE Adult-shaped data" }
}

fn main() -> ExitCode {
    let adult = load_adult();
    let checks: [(&str, &str, Check); 7] = [
        ("C1", "push-sum correctness", c1_push_sum),
        ("C2", "single-node equivalence with Pegasos", c2_single_node),
        ("C3", "accuracy reproduction", c3_accuracy),
        ("C4", "regret-bound certificate", c4_certificate),
        ("C5", "Lipschitz property", c5_lipschitz),
        ("C6", "disagreement vs gossip budget", c6_disagreement),
        ("C7", "determinism across reruns and worker counts", c7_determinism),
    ];
    let mut failed = 0;
    for (id, name, check) in checks {
        let start = Instant::now();
        let v = check(&adult);
        let secs = start.elapsed().as_secs_f64();
        failed += usize::from(!v.pass);
        println!("[{}] {id} {name}: {} ({secs:.1} s)", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} of {} criteria passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn within(start: Instant, budget: Duration) -> (bool, String) {
    let took = start.elapsed();
    (took < budget, format!("runtime {:.1} s of {} s", took.as_secs_f64(), budget.as_secs()))
}

fn c1_push_sum(_: &Adult) -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_err = 0.0f64;
    let mut worst_mass = 0.0f64;
    let mut most_rounds = 0;
    for g in 0..C1_GRAPHS {
        let m = rng.gen_range(2..=C1_MAX_NODES);
        let p = rng.gen_range(0.15..0.6);
        let topo = match Topology::erdos_renyi(m, p, g as u64) {
            Ok(t) => t,
            Err(e) => return verdict(false, format!("graph {g}: {e}")),
        };
        let rounds = rounds_for_accuracy(&topo, C1_GAMMA).expect("gamma in range");
        most_rounds = most_rounds.max(rounds);
        let values: Vec<DenseVector> = (0..m)
            .map(|_| DenseVector::from_vec((0..3).map(|_| rng.gen_range(1.0..2.0)).collect()).unwrap())
            .collect();
        let mut avg = DenseVector::zeros(3);
        for v in &values {
            avg.add_scaled(1.0 / m as f64, v).unwrap();
        }
        let mass = |s: &[PushSumState]| {
            let mut v = DenseVector::zeros(3);
            for st in s {
                v.add_assign(&st.v).unwrap();
            }
            (v, s.iter().map(|st| st.w).sum::<f64>())
        };
        let mut states: Vec<PushSumState> =
            values.iter().enumerate().map(|(i, v)| PushSumState::new(i, v.clone(), 1.0)).collect();
        let (v0, w0) = mass(&states);
        let mut gossip = PushSum::deterministic(build_metropolis_matrix(&topo).unwrap());
        for _ in 0..rounds {
            states = gossip.run(states, 1, &Sequential).unwrap();
            let (v, w) = mass(&states);
            worst_mass = worst_mass.max(v.distance(&v0).unwrap()).max((w - w0).abs());
        }
        let estimates: Vec<DenseVector> = states.iter().map(PushSumState::estimate).collect();
        worst_err = worst_err.max(relative_error(&estimates, &avg).unwrap());
    }
    let (fast, time) = within(start, C1_BUDGET);
    verdict(
        worst_err <= C1_GAMMA && worst_mass <= C1_MASS_TOL && fast,
        format!(
            "{C1_GRAPHS} graphs, max relative error {worst_err:.2e} <= {C1_GAMMA:e}, \
             max mass drift {worst_mass:.2e} <= {C1_MASS_TOL:e}, up to {most_rounds} rounds, {time}"
        ),
    )
}

fn c2_single_node(adult: &Adult) -> Verdict {
    let start = Instant::now();
    for seed in C2_SEEDS {
        let hp = HyperParams::new(ADULT_LAMBDA, C2_ITERS).unwrap().with_seed(seed).with_epsilon(0.0);
        let cfg = GadgetConfig::new(hp.clone(), Topology::complete(1).unwrap()).unwrap();
        let mut trajectory: Vec<DenseVector> = Vec::with_capacity(C2_ITERS);
        gadget_train_with(vec![Shard::whole(&adult.train, 0).unwrap()], None, &cfg, &Sequential, |_, s| {
            trajectory.push(s[0].w_hat.clone())
        })
        .unwrap();
        let mut mismatch = None;
        pegasos_train_observed(&adult.train, &hp, |t, w| {
            let same = trajectory[t - 1].as_slice().iter().zip(w.as_slice()).all(|(a, b)| a.to_bits() == b.to_bits());
            if !same && mismatch.is_none() {
                mismatch = Some(t);
            }
        })
        .unwrap();
        if let Some(t) = mismatch {
            return verdict(false, format!("{}: seed {seed} diverges at t = {t}", adult.source));
        }
    }
    let (fast, time) = within(start, C2_BUDGET);
    verdict(fast, format!("{}: {C2_ITERS} iterations bitwise equal for seeds {C2_SEEDS:?}, {time}", adult.source))
}

fn c3_accuracy(_: &Adult) -> Verdict {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for (name, gadget_target, pegasos_target) in C3_TARGETS {
        let (train, test) = match locate(name) {
            Ok(p) => p,
            Err(missing) => return verdict(false, format!("BLOCKED: {} not found", missing.display())),
        };
        let run = |command: Command| -> Result<f64, String> {
            let mut cfg = ExperimentConfig::new(command);
            let settings = [
                ("train", train.to_string_lossy().into_owned()),
                ("test", test.to_string_lossy().into_owned()),
                ("lambda", name.to_string()),
                ("nodes", "10".into()),
                ("topology", "complete".into()),
                ("gossip-rounds", "measured".into()),
                ("epsilon", "0.001".into()),
                ("iters", C3_ITERATION_CAP.to_string()),
                ("trials", C3_TRIALS.to_string()),
            ];
            for (k, v) in &settings {
                cfg.set(k, v).map_err(|e| e.to_string())?;
            }
            match run_experiment(&cfg).map_err(|e| e.to_string())? {
                Outcome::Training(r) => Ok(r.accuracy.mean),
                Outcome::PushSum(_) => unreachable!("training command"),
            }
        };
        let (g, p) = match (run(Command::Gadget), run(Command::Pegasos)) {
            (Ok(g), Ok(p)) => (g, p),
            (Err(e), _) | (_, Err(e)) => return verdict(false, format!("{name}: {e}")),
        };
        pass &= (g - gadget_target).abs() <= C3_TOLERANCE_PTS && (p - pegasos_target).abs() <= C3_TOLERANCE_PTS;
        lines.push(format!("{name} GADGET {g:.2}% (target {gadget_target}), Pegasos {p:.2}% (target {pegasos_target})"));
    }
    let (fast, time) = within(start, C3_BUDGET);
    verdict(pass && fast, format!("{}; tolerance {C3_TOLERANCE_PTS} points, {time}", lines.join("; ")))
}

fn c4_certificate(_: &Adult) -> Verdict {
    let start = Instant::now();
    let ds = separable_2d(C4_POINTS, C4_MARGIN, 4);
    let oracle_hp = HyperParams::new(C4_LAMBDA, C4_ORACLE_ITERS).unwrap().with_epsilon(0.0).with_seed(7);
    let oracle = pegasos_train(&ds, &oracle_hp).unwrap().model;
    let f = |w: &DenseVector| primal_objective(w, ds.instances(), C4_LAMBDA).unwrap();
    let f_star = f(&oracle.w).min(f(&oracle.average));
    let radius = instance_radius(ds.instances()).unwrap();
    let c = subgradient_bound_estimate(C4_LAMBDA, radius);

    let mut pass = true;
    let mut parts = Vec::new();
    for t in C4_HORIZONS {
        let hp = HyperParams::new(C4_LAMBDA, t).unwrap().with_epsilon(0.0).with_seed(11);
        let cfg = GadgetConfig::new(hp, Topology::ring(C4_NODES).unwrap()).unwrap();
        let out = gadget_train_with(partition(&ds, C4_NODES, 11).unwrap(), None, &cfg, &Sequential, |_, _| {}).unwrap();
        let gamma = out.gossip_max_relative_error;
        let bound = match BoundInputs::new(C4_LAMBDA, t, c, radius, gamma) {
            Ok(b) => regret_bound(&b),
            Err(e) => return verdict(false, format!("T = {t}: {e}")),
        };
        let worst_gap = out.node_models.iter().map(|m| f(&m.average) - f_star).fold(f64::NEG_INFINITY, f64::max);
        pass &= worst_gap <= bound;
        parts.push(format!("T = {t}: worst gap {worst_gap:.3e} <= bound {bound:.3} (gamma {gamma:.1e})"));
    }
    let (fast, time) = within(start, C4_BUDGET);
    verdict(pass && fast, format!("{}, {time}", parts.join("; ")))
}

fn c5_lipschitz(adult: &Adult) -> Verdict {
    let start = Instant::now();
    let mut sets: Vec<(String, Dataset)> =
        vec![(adult.source.to_string(), adult.train.clone()), ("separable 2-D".into(), separable_2d(C4_POINTS, C4_MARGIN, 4))];
    for name in ["reuters", "usps"] {
        if let Ok((train, _)) = locate(name) {
            match load_dataset(&train, None) {
                Ok(ds) => sets.push((name.to_string(), ds)),
                Err(e) => return verdict(false, format!("{name}: {e}")),
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0;
    let mut names = Vec::new();
    for (name, ds) in &sets {
        let radius = instance_radius(ds.instances()).unwrap();
        let random_w = |rng: &mut ChaCha8Rng| {
            let scale = 10f64.powf(rng.gen_range(-3.0..1.0));
            DenseVector::from_vec((0..ds.dim()).map(|_| rng.gen_range(-scale..scale)).collect()).unwrap()
        };
        for _ in 0..C5_PAIRS {
            let (w1, w2) = (random_w(&mut rng), random_w(&mut rng));
            let l1 = mean_hinge_loss(&w1, ds.instances()).unwrap();
            let l2 = mean_hinge_loss(&w2, ds.instances()).unwrap();
            let allowed = radius * w1.distance(&w2).unwrap();
            if (l1 - l2).abs() > allowed * (1.0 + C5_SLACK) {
                violations += 1;
            }
        }
        names.push(name.clone());
    }
    let (fast, time) = within(start, C5_BUDGET);
    verdict(
        violations == 0 && fast,
        format!("{violations} violations over {C5_PAIRS} pairs on each of [{}], {time}", names.join(", ")),
    )
}

/// Mean over iterations of the largest pairwise distance between node weights.
fn mean_disagreement(adult: &Adult, rounds: usize, seed: u64) -> f64 {
    let hp = HyperParams::new(ADULT_LAMBDA, C6_ITERS).unwrap().with_epsilon(0.0).with_seed(seed);
    let cfg = GadgetConfig::new(hp, Topology::ring(C6_NODES).unwrap()).unwrap().with_gossip_rounds(rounds);
    let mut total = 0.0;
    gadget_train_with(partition(&adult.train, C6_NODES, seed).unwrap(), None, &cfg, &Sequential, |_, states| {
        let ws: Vec<&DenseVector> = states.iter().map(|s| &s.w_hat).collect();
        total += max_pairwise_distance(&ws);
    })
    .unwrap();
    total / C6_ITERS as f64
}

fn c6_disagreement(adult: &Adult) -> Verdict {
    let start = Instant::now();
    let (few, many) = C6_ROUNDS;
    let avg = |rounds| C6_SEEDS.iter().map(|&s| mean_disagreement(adult, rounds, s)).sum::<f64>() / C6_SEEDS.len() as f64;
    let (d_few, d_many) = (avg(few), avg(many));
    let (fast, time) = within(start, C6_BUDGET);
    verdict(
        d_many < d_few && fast,
        format!("{}: {many} rounds {d_many:.4e} < {few} rounds {d_few:.4e}, {time}", adult.source),
    )
}

/// Every file a run wrote except the wall-clock timings, by name.
fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "timing.txt")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn c7_determinism(adult: &Adult) -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let train = tmp.path().join("adult.train");
    let test = tmp.path().join("adult.test");
    write_dataset(&train, adult.train.instances()).unwrap();
    write_dataset(&test, adult.test.instances()).unwrap();

    let variants: [(&str, &[(&str, &str)]); 4] = [
        ("gadget ring deterministic", &[("command", "gadget"), ("topology", "ring"), ("gossip-rounds", "4")]),
        ("gadget complete randomized", &[("command", "gadget"), ("gossip-mode", "randomized"), ("gossip-rounds", "3")]),
        ("gadget ring, test shards", &[("command", "gadget"), ("topology", "ring"), ("gossip-rounds", "2")]),
        ("pegasos", &[("command", "pegasos")]),
    ];
    let mut compared = 0;
    for (k, (label, settings)) in variants.iter().enumerate() {
        let mut reference: Option<Vec<(String, Vec<u8>)>> = None;
        for (run, workers) in C7_WORKERS.iter().enumerate() {
            let out = tmp.path().join(format!("v{k}-r{run}"));
            let mut cfg = ExperimentConfig::new(Command::Gadget);
            let common = [
                ("train", train.to_string_lossy().into_owned()),
                ("lambda", "adult".into()),
                ("iters", C7_ITERS.into()),
                ("epsilon", "0".into()),
                ("trials", "2".into()),
                ("seed", "3".into()),
                ("workers", workers.to_string()),
                ("out", out.to_string_lossy().into_owned()),
            ];
            for (key, value) in common.iter().map(|(a, b)| (*a, b.as_str())).chain(settings.iter().copied()) {
                cfg.set(key, value).unwrap();
            }
            if label.contains("test shards") {
                cfg.set("test", &test.to_string_lossy()).unwrap();
            }
            if let Err(e) = run_experiment(&cfg) {
                return verdict(false, format!("{label}: {e}"));
            }
            let files = outputs(&out);
            match &reference {
                None => reference = Some(files),
                Some(r) if *r == files => compared += files.len(),
                Some(_) => return verdict(false, format!("{label}: outputs differ with {workers} workers (run {run})")),
            }
        }
    }
    let workers = PoolExecutor::new(4).map(|p| p.workers()).unwrap_or(0);
    verdict(
        true,
        format!(
            "{}: {compared} output files byte-identical over {} variants, reruns and pools of 1 and {workers} workers",
            adult.source,
            variants.len()
        ),
    )
}
