use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use gadget::config::{Command, ExperimentConfig};
use gadget::experiment::{render, run_experiment};

/// Train linear SVMs on a simulated peer-to-peer network with push-sum gossip.
#[derive(Debug, Parser)]
#[command(name = "gadget", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Distributed training: local sub-gradient steps averaged by gossip.
    Gadget(Flags),
    /// Centralized Pegasos on the whole training set.
    Pegasos(Flags),
    /// Average `--values` over a topology with push-sum.
    Pushsum(Flags),
}

/// Every flag mirrors the config key of the same name and overrides it.
#[derive(Debug, Args)]
struct Flags {
    /// Config file of `key = value` lines under `[section]` headers.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Training data in LIBSVM format.
    #[arg(long)]
    train: Option<String>,
    /// Test data in LIBSVM format; each node scores its own slice.
    #[arg(long)]
    test: Option<String>,
    /// Feature dimension override.
    #[arg(long)]
    dim: Option<String>,
    /// Number of simulated nodes.
    #[arg(long)]
    nodes: Option<String>,
    /// ring[:m], complete[:m], star[:m], path[:m], random-k-regular:k[:seed],
    /// erdos-renyi:p[:seed], or a topology file.
    #[arg(long)]
    topology: Option<String>,
    /// Regularization, as a number or a preset (adult, ccat, mnist, reuters, usps, webspam).
    #[arg(long)]
    lambda: Option<String>,
    /// Iteration cap.
    #[arg(long)]
    iters: Option<String>,
    /// Stop when every node's weight change is below this; 0 never stops early.
    #[arg(long)]
    epsilon: Option<String>,
    /// Consecutive iterations below epsilon required to stop.
    #[arg(long)]
    patience: Option<String>,
    /// Target relative gossip accuracy for automatic round budgets.
    #[arg(long)]
    gamma: Option<String>,
    /// deterministic or randomized.
    #[arg(long = "gossip-mode")]
    gossip_mode: Option<String>,
    /// auto, measured, or a fixed count per iteration.
    #[arg(long = "gossip-rounds")]
    gossip_rounds: Option<String>,
    /// Project the local step onto the ball before gossip.
    #[arg(long = "project-pre")]
    project_pre: Option<String>,
    /// Project the gossip estimate onto the ball.
    #[arg(long = "project-post")]
    project_post: Option<String>,
    /// sample or violating-set-mean.
    #[arg(long = "loss-mode")]
    loss_mode: Option<String>,
    /// Gossip shard-size-weighted averages.
    #[arg(long = "weight-by-shard-size")]
    weight_by_shard_size: Option<String>,
    /// Trace cadence in iterations.
    #[arg(long = "trace-every")]
    trace_every: Option<String>,
    /// Base seed; trial k uses seed + k.
    #[arg(long)]
    seed: Option<String>,
    /// Number of seeds.
    #[arg(long)]
    trials: Option<String>,
    /// Worker threads for node-parallel work.
    #[arg(long)]
    workers: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Count data loading in reported training time.
    #[arg(long = "include-load-time", num_args = 0..=1, default_missing_value = "true")]
    include_load_time: Option<String>,
    /// Comma-separated node values for the push-sum demo.
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
    /// Write every push-sum message to messages.csv.
    #[arg(long = "message-log", num_args = 0..=1, default_missing_value = "true")]
    message_log: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("train", &self.train),
            ("test", &self.test),
            ("dim", &self.dim),
            ("nodes", &self.nodes),
            ("topology", &self.topology),
            ("lambda", &self.lambda),
            ("iters", &self.iters),
            ("epsilon", &self.epsilon),
            ("patience", &self.patience),
            ("gamma", &self.gamma),
            ("gossip-mode", &self.gossip_mode),
            ("gossip-rounds", &self.gossip_rounds),
            ("project-pre", &self.project_pre),
            ("project-post", &self.project_post),
            ("loss-mode", &self.loss_mode),
            ("weight-by-shard-size", &self.weight_by_shard_size),
            ("trace-every", &self.trace_every),
            ("seed", &self.seed),
            ("trials", &self.trials),
            ("workers", &self.workers),
            ("out", &self.out),
            ("include-load-time", &self.include_load_time),
            ("values", &self.values),
            ("message-log", &self.message_log),
        ]
    }
}

fn resolve(command: Command, flags: &Flags) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(command);
    if let Some(path) = &flags.config {
        cfg.apply_file(path)?;
        cfg.command = command;
    }
    for (key, value) in flags.pairs() {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let (command, flags) = match &cli.command {
        Cmd::Gadget(f) => (Command::Gadget, f),
        Cmd::Pegasos(f) => (Command::Pegasos, f),
        Cmd::Pushsum(f) => (Command::PushSum, f),
    };
    let cfg = resolve(command, flags)?;
    let outcome = run_experiment(&cfg).with_context(|| format!("{command} run failed"))?;
    print!("{}", render(&outcome));
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
