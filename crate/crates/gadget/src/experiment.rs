//! Experiment orchestration: load, partition, train, evaluate, report.

use std::fs;
use std::path::Path;
use std::time::Instant;

use gadget_core::eval::{aggregate_trials, data_radius, regret_bound, subgradient_bound_estimate, BoundInputs, TrialSummary};
use gadget_core::gadget::gadget_train_with;
use gadget_core::gossip::{build_metropolis_matrix, measured_rounds_for_accuracy, PushSum};
use gadget_core::svm::{pegasos_train, zero_one_error};
use gadget_core::{partition, rounds_for_accuracy, Dataset, DenseVector, GadgetConfig, HyperParams, Topology};

use crate::config::{Command, ExperimentConfig, GossipRounds};
use crate::error::{Error, Result};
use crate::exec::PoolExecutor;
use crate::libsvm::load_dataset;
use crate::report::{self, Echo};
use crate::topology::parse_topology_spec;

/// Upper limit on the spike-probe search behind `gossip-rounds = measured`.
pub const MAX_MEASURED_ROUNDS: usize = 1_000_000;

/// Regret-bound certificate of one distributed run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub radius: f64,
    pub c: f64,
    pub gamma: f64,
    pub bound: f64,
}

/// Outcome of one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub seed: u64,
    /// Accuracy (percent) of each node on its local test shard, or on its
    /// training shard when no test file was given. One entry for Pegasos.
    pub node_accuracy_pct: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub max_delta_at_stop: f64,
    pub mean_delta_at_stop: f64,
    pub final_mean_objective: f64,
    pub gossip_rounds: Option<usize>,
    pub gossip_max_relative_error: Option<f64>,
    pub certificate: Option<Certificate>,
    pub train_seconds: f64,
    pub trace_csv: String,
}

impl TrialReport {
    pub fn mean_accuracy_pct(&self) -> f64 {
        gadget_core::eval::mean(&self.node_accuracy_pct)
    }

    fn echo(&self) -> Echo {
        let mut e: Echo = vec![
            ("seed".into(), self.seed.to_string()),
            ("accuracy-mean-pct".into(), self.mean_accuracy_pct().to_string()),
            (
                "node-accuracy-pct".into(),
                self.node_accuracy_pct.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
            ),
            ("stopped-at".into(), self.iterations.to_string()),
            ("converged".into(), self.converged.to_string()),
            ("epsilon-at-stop-max".into(), self.max_delta_at_stop.to_string()),
            ("epsilon-at-stop-mean".into(), self.mean_delta_at_stop.to_string()),
            ("final-mean-objective".into(), self.final_mean_objective.to_string()),
        ];
        if let Some(r) = self.gossip_rounds {
            e.push(("gossip-rounds-used".into(), r.to_string()));
        }
        if let Some(g) = self.gossip_max_relative_error {
            e.push(("gossip-max-relative-error".into(), g.to_string()));
        }
        if let Some(c) = self.certificate {
            e.push(("bound-radius".into(), c.radius.to_string()));
            e.push(("bound-c".into(), c.c.to_string()));
            e.push(("bound-gamma".into(), c.gamma.to_string()));
            e.push(("regret-bound".into(), c.bound.to_string()));
        }
        e
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub config: Echo,
    pub trials: Vec<TrialReport>,
    /// Mean and `sqrt(Var(Nodes) + Var(Trials))` of accuracy in percent.
    pub accuracy: TrialSummary,
    pub load_seconds: f64,
}

/// Outcome of the push-sum demo.
#[derive(Debug, Clone, PartialEq)]
pub struct PushSumReport {
    pub config: Echo,
    pub rounds: usize,
    pub average: f64,
    pub estimates: Vec<f64>,
    pub max_relative_error: f64,
    pub message_log_csv: Option<String>,
}

/// The outcome of [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Training(RunReport),
    PushSum(PushSumReport),
}

/// Gossip rounds per iteration for `topo` under the configured policy.
pub fn resolve_gossip_rounds(policy: GossipRounds, topo: &Topology, gamma: f64) -> Result<usize> {
    match policy {
        GossipRounds::Fixed(n) => Ok(n),
        GossipRounds::Auto => Ok(rounds_for_accuracy(topo, gamma)?),
        GossipRounds::Measured => {
            let b = build_metropolis_matrix(topo)?;
            match measured_rounds_for_accuracy(&b, gamma, MAX_MEASURED_ROUNDS)? {
                Some(r) => Ok(r.max(1)),
                None => Err(Error::config("gossip-rounds", format!("no budget up to {MAX_MEASURED_ROUNDS} reaches gamma"))),
            }
        }
    }
}

/// Hyperparameters of one trial.
pub fn hyper_params(cfg: &ExperimentConfig, seed: u64) -> Result<HyperParams> {
    let mut hp = HyperParams::new(cfg.lambda, cfg.iters)?
        .with_epsilon(cfg.epsilon)
        .with_patience(cfg.patience)
        .with_projection(cfg.project_pre, cfg.project_post)
        .with_loss_mode(cfg.loss_mode)
        .with_seed(seed);
    if let Some(every) = cfg.trace_every {
        hp = hp.with_trace_every(every);
    }
    hp.validate()?;
    Ok(hp)
}

/// One distributed trial: partition train (and test) with `seed`, train, and
/// score every node on its local shard.
pub fn run_gadget_trial(
    train: &Dataset,
    test: Option<&Dataset>,
    cfg: &ExperimentConfig,
    seed: u64,
    exec: &PoolExecutor,
) -> Result<TrialReport> {
    let m = cfg.nodes;
    let topo = parse_topology_spec(&cfg.topology, m, cfg.seed)?;
    let rounds = resolve_gossip_rounds(cfg.gossip_rounds, &topo, cfg.gamma)?;
    let gcfg = GadgetConfig::new(hyper_params(cfg, seed)?, topo)?
        .with_gossip_rounds(rounds)
        .with_gossip_mode(cfg.gossip_mode)
        .with_weight_by_shard_size(cfg.weight_by_shard_size);

    let shards = partition(train, m, seed)?;
    let eval_shards = match test {
        Some(t) => partition(t, m, seed)?,
        None => shards.clone(),
    };

    let start = Instant::now();
    let out = gadget_train_with(shards, test.map(|_| eval_shards.as_slice()), &gcfg, exec, |_, _| {})?;
    let train_seconds = start.elapsed().as_secs_f64();

    let node_accuracy_pct = out
        .node_models
        .iter()
        .zip(&eval_shards)
        .map(|(model, shard)| Ok(100.0 * (1.0 - zero_one_error(&model.w, shard.instances())?)))
        .collect::<Result<Vec<f64>>>()?;

    let gamma = out.gossip_max_relative_error;
    let radius = data_radius(train)?;
    let c = subgradient_bound_estimate(cfg.lambda, radius);
    let certificate = BoundInputs::new(cfg.lambda, out.iterations, c, radius, gamma)
        .ok()
        .map(|b| Certificate { radius, c, gamma, bound: regret_bound(&b) });

    let last = out.trace.last().expect("a finished run records its stopping iteration");
    Ok(TrialReport {
        seed,
        node_accuracy_pct,
        iterations: out.iterations,
        converged: out.converged,
        max_delta_at_stop: out.max_delta_at_stop,
        mean_delta_at_stop: out.mean_delta_at_stop,
        final_mean_objective: last.mean_objective,
        gossip_rounds: Some(rounds),
        gossip_max_relative_error: Some(gamma),
        certificate,
        train_seconds,
        trace_csv: report::trace_csv(&out.trace)?,
    })
}

/// One centralized trial on the whole training set.
pub fn run_pegasos_trial(train: &Dataset, test: Option<&Dataset>, cfg: &ExperimentConfig, seed: u64) -> Result<TrialReport> {
    let hp = hyper_params(cfg, seed)?;
    let start = Instant::now();
    let out = pegasos_train(train, &hp)?;
    let train_seconds = start.elapsed().as_secs_f64();
    let eval = test.unwrap_or(train);
    let accuracy = 100.0 * (1.0 - zero_one_error(&out.model.w, eval.instances())?);
    let last = out.trace.last().expect("a finished run records its stopping iteration");
    Ok(TrialReport {
        seed,
        node_accuracy_pct: vec![accuracy],
        iterations: out.model.iterations,
        converged: out.converged,
        max_delta_at_stop: out.last_delta,
        mean_delta_at_stop: out.last_delta,
        final_mean_objective: last.objective,
        gossip_rounds: None,
        gossip_max_relative_error: None,
        certificate: None,
        train_seconds,
        trace_csv: report::pegasos_trace_csv(&out.trace)?,
    })
}

/// Loads train and optional test data declared at one common dimension.
pub fn load_data(cfg: &ExperimentConfig) -> Result<(Dataset, Option<Dataset>)> {
    let train_path = cfg.train.as_ref().ok_or_else(|| Error::config("train", "a training file is required"))?;
    let train = load_dataset(train_path, cfg.dim)?;
    let test = cfg.test.as_ref().map(|p| load_dataset(p, cfg.dim)).transpose()?;
    let dim = train.dim().max(test.as_ref().map_or(0, Dataset::dim));
    let train = train.with_dim(dim)?;
    let test = test.map(|t| t.with_dim(dim)).transpose()?;
    Ok((train, test))
}

/// Runs the configured command and, when `out` is set, writes its files.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let outcome = match cfg.command {
        Command::PushSum => Outcome::PushSum(run_pushsum(cfg)?),
        Command::Gadget | Command::Pegasos => Outcome::Training(run_training(cfg)?),
    };
    if let Some(dir) = &cfg.out {
        write_outputs(&outcome, dir, cfg)?;
    }
    Ok(outcome)
}

fn run_training(cfg: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    let (train, test) = load_data(cfg)?;
    let load_seconds = start.elapsed().as_secs_f64();
    let exec = PoolExecutor::new(cfg.workers).map_err(|e| Error::config("workers", e.to_string()))?;

    let mut trials = Vec::new();
    for seed in cfg.seeds() {
        let mut trial = match cfg.command {
            Command::Gadget => run_gadget_trial(&train, test.as_ref(), cfg, seed, &exec)?,
            _ => run_pegasos_trial(&train, test.as_ref(), cfg, seed)?,
        };
        if cfg.include_load_time {
            trial.train_seconds += load_seconds;
        }
        trials.push(trial);
    }
    let per_trial: Vec<Vec<f64>> = trials.iter().map(|t| t.node_accuracy_pct.clone()).collect();
    Ok(RunReport { config: cfg.echo(), accuracy: aggregate_trials(&per_trial)?, trials, load_seconds })
}

/// Averages `--values` over the configured topology and reports every node's estimate.
pub fn run_pushsum(cfg: &ExperimentConfig) -> Result<PushSumReport> {
    let values = cfg.values.as_ref().ok_or_else(|| Error::config("values", "pushsum needs --values"))?;
    let m = values.len();
    let topo = parse_topology_spec(&cfg.topology, m, cfg.seed)?;
    let rounds = resolve_gossip_rounds(cfg.gossip_rounds, &topo, cfg.gamma)?;
    let mut gossip = PushSum::new(build_metropolis_matrix(&topo)?, cfg.gossip_mode, cfg.seed);
    if cfg.message_log {
        gossip = gossip.with_message_log();
    }
    let payload = values.iter().map(|&v| DenseVector::from_vec(vec![v])).collect::<Result<Vec<_>, _>>()?;
    let exec = PoolExecutor::new(cfg.workers).map_err(|e| Error::config("workers", e.to_string()))?;
    let out = gossip.push_vector(&payload, None, rounds, &exec)?;
    Ok(PushSumReport {
        config: cfg.echo_pushsum(),
        rounds,
        average: values.iter().sum::<f64>() / m as f64,
        estimates: out.estimates.iter().map(|e| e[0]).collect(),
        max_relative_error: out.report.max_relative_error,
        message_log_csv: cfg.message_log.then(|| report::message_log_csv(gossip.last_message_log())),
    })
}

/// Human-readable result lines for the terminal.
pub fn render(outcome: &Outcome) -> String {
    match outcome {
        Outcome::PushSum(p) => {
            let mut s = format!("rounds = {}\ntrue average = {}\n", p.rounds, p.average);
            for (i, e) in p.estimates.iter().enumerate() {
                s.push_str(&format!("node {i}: {e}\n"));
            }
            s.push_str(&format!("max relative error = {}\n", p.max_relative_error));
            s
        }
        Outcome::Training(r) => {
            let mut s = String::new();
            for t in &r.trials {
                s.push_str(&format!(
                    "seed {}: accuracy {:.2}% stopped at {} ({}) in {:.3}s\n",
                    t.seed,
                    t.mean_accuracy_pct(),
                    t.iterations,
                    if t.converged { "converged" } else { "iteration cap" },
                    t.train_seconds
                ));
            }
            s.push_str(&format!("accuracy {:.2} +/- {:.2} %\n", r.accuracy.mean, r.accuracy.std));
            s
        }
    }
}

fn write_outputs(outcome: &Outcome, dir: &Path, cfg: &ExperimentConfig) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    match outcome {
        Outcome::PushSum(p) => {
            let result: Echo = vec![
                ("rounds".into(), p.rounds.to_string()),
                ("true-average".into(), p.average.to_string()),
                ("estimates".into(), p.estimates.iter().map(f64::to_string).collect::<Vec<_>>().join(",")),
                ("max-relative-error".into(), p.max_relative_error.to_string()),
            ];
            report::write(dir.join("summary.txt"), &report::summary_text(&[("config", &p.config), ("result", &result)]))?;
            if let Some(log) = &p.message_log_csv {
                report::write(dir.join("messages.csv"), &(report::comment_block(&p.config) + log))?;
            }
        }
        Outcome::Training(r) => {
            let mut timing = String::from("seed,train_seconds\n");
            for t in &r.trials {
                let mut echo = r.config.clone();
                echo.push(("trial-seed".into(), t.seed.to_string()));
                report::write(dir.join(format!("trace_seed{}.csv", t.seed)), &(report::comment_block(&echo) + &t.trace_csv))?;
                let result = t.echo();
                report::write(
                    dir.join(format!("summary_seed{}.txt", t.seed)),
                    &report::summary_text(&[("config", &echo), ("result", &result)]),
                )?;
                timing.push_str(&format!("{},{}\n", t.seed, t.train_seconds));
            }
            let aggregate: Echo = vec![
                ("seeds".into(), cfg.seeds().iter().map(u64::to_string).collect::<Vec<_>>().join(",")),
                ("accuracy-mean-pct".into(), r.accuracy.mean.to_string()),
                ("accuracy-std-pct".into(), r.accuracy.std.to_string()),
                ("var-nodes".into(), r.accuracy.var_nodes.to_string()),
                ("var-trials".into(), r.accuracy.var_trials.to_string()),
            ];
            report::write(dir.join("summary.txt"), &report::summary_text(&[("config", &r.config), ("aggregate", &aggregate)]))?;
            timing.push_str(&format!("load_seconds,{}\n", r.load_seconds));
            report::write(dir.join("timing.txt"), &timing)?;
        }
    }
    Ok(())
}
