//! Experiment configuration.
//!
//! Config files are plain `key = value` lines grouped under `[section]`
//! headers; `#` starts a comment. Every key is also a command-line flag of the
//! same name, and flags override the file.
//!
//! ```text
//! [data]
//! train = data/adult.train
//! test = data/adult.test
//!
//! [svm]
//! lambda = adult
//! epsilon = 0.001
//!
//! [gadget]
//! nodes = 10
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gadget_core::{GossipMode, LossMode};

use crate::error::{Error, Result};
use crate::report::Echo;

/// Regularization presets for the benchmark datasets.
pub const LAMBDA_PRESETS: [(&str, f64); 6] = [
    ("adult", 3.07e-5),
    ("ccat", 1e-4),
    ("mnist", 1.67e-5),
    ("reuters", 1.29e-4),
    ("usps", 1.36e-4),
    ("webspam", 1e-5),
];

pub fn lambda_preset(name: &str) -> Option<f64> {
    LAMBDA_PRESETS.iter().find(|(n, _)| *n == name).map(|&(_, l)| l)
}

/// Every accepted key with the section it belongs to.
pub const KEYS: [(&str, &str); 25] = [
    ("train", "data"),
    ("test", "data"),
    ("dim", "data"),
    ("lambda", "svm"),
    ("iters", "svm"),
    ("epsilon", "svm"),
    ("patience", "svm"),
    ("project-pre", "svm"),
    ("project-post", "svm"),
    ("loss-mode", "svm"),
    ("trace-every", "svm"),
    ("topology", "gossip"),
    ("gamma", "gossip"),
    ("gossip-mode", "gossip"),
    ("gossip-rounds", "gossip"),
    ("values", "gossip"),
    ("message-log", "gossip"),
    ("nodes", "gadget"),
    ("weight-by-shard-size", "gadget"),
    ("seed", "run"),
    ("trials", "run"),
    ("workers", "run"),
    ("out", "run"),
    ("include-load-time", "run"),
    ("command", "run"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Gadget,
    Pegasos,
    PushSum,
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gadget" => Ok(Command::Gadget),
            "pegasos" => Ok(Command::Pegasos),
            "pushsum" => Ok(Command::PushSum),
            _ => Err(format!("unknown command `{s}`")),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Gadget => "gadget",
            Command::Pegasos => "pegasos",
            Command::PushSum => "pushsum",
        })
    }
}

/// Push-sum rounds per iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GossipRounds {
    /// `ceil(2 m ln(1/gamma))`.
    Auto,
    /// Smallest count that averages a spike probe to `gamma`.
    Measured,
    Fixed(usize),
}

impl fmt::Display for GossipRounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GossipRounds::Auto => f.write_str("auto"),
            GossipRounds::Measured => f.write_str("measured"),
            GossipRounds::Fixed(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub dim: Option<usize>,
    pub nodes: usize,
    pub topology: String,
    pub lambda: f64,
    /// Name of the preset `lambda` came from, if any.
    pub lambda_preset: Option<String>,
    pub iters: usize,
    pub epsilon: f64,
    pub patience: usize,
    pub gamma: f64,
    pub gossip_mode: GossipMode,
    pub gossip_rounds: GossipRounds,
    pub project_pre: bool,
    pub project_post: bool,
    pub loss_mode: LossMode,
    pub weight_by_shard_size: bool,
    pub trace_every: Option<usize>,
    pub seed: u64,
    pub trials: usize,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub include_load_time: bool,
    pub values: Option<Vec<f64>>,
    pub message_log: bool,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command,
            train: None,
            test: None,
            dim: None,
            nodes: 10,
            topology: "complete".into(),
            lambda: 1e-4,
            lambda_preset: None,
            iters: 100_000,
            epsilon: 1e-3,
            patience: 1,
            gamma: 1e-4,
            gossip_mode: GossipMode::Deterministic,
            gossip_rounds: GossipRounds::Auto,
            project_pre: false,
            project_post: true,
            loss_mode: LossMode::Sample,
            weight_by_shard_size: true,
            trace_every: None,
            seed: 0,
            trials: 1,
            workers: 1,
            out: None,
            include_load_time: false,
            values: None,
            message_log: false,
        }
    }

    /// Seeds of the individual trials: `seed, seed + 1, ...`.
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.trials as u64).map(|k| self.seed.wrapping_add(k)).collect()
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let fail = |msg: String| Error::config(key, msg);
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::config(key, format!("cannot parse `{v}`")))
        }
        match key {
            "command" => self.command = value.parse().map_err(fail)?,
            "train" => self.train = Some(PathBuf::from(value)),
            "test" => self.test = Some(PathBuf::from(value)),
            "dim" => self.dim = Some(num(key, value)?),
            "nodes" => self.nodes = num(key, value)?,
            "topology" => self.topology = value.to_string(),
            "lambda" => match lambda_preset(value) {
                Some(l) => {
                    self.lambda = l;
                    self.lambda_preset = Some(value.to_string());
                }
                None => {
                    self.lambda = num(key, value)?;
                    self.lambda_preset = None;
                }
            },
            "iters" => self.iters = num(key, value)?,
            "epsilon" => self.epsilon = num(key, value)?,
            "patience" => self.patience = num(key, value)?,
            "gamma" => self.gamma = num(key, value)?,
            "gossip-mode" => {
                self.gossip_mode = match value {
                    "deterministic" => GossipMode::Deterministic,
                    "randomized" => GossipMode::Randomized,
                    _ => return Err(fail(format!("expected deterministic or randomized, got `{value}`"))),
                }
            }
            "gossip-rounds" => {
                self.gossip_rounds = match value {
                    "auto" => GossipRounds::Auto,
                    "measured" => GossipRounds::Measured,
                    n => GossipRounds::Fixed(num(key, n)?),
                }
            }
            "project-pre" => self.project_pre = boolean(key, value)?,
            "project-post" => self.project_post = boolean(key, value)?,
            "loss-mode" => {
                self.loss_mode = match value {
                    "sample" => LossMode::Sample,
                    "violating-set-mean" => LossMode::ViolatingSetMean,
                    _ => return Err(fail(format!("expected sample or violating-set-mean, got `{value}`"))),
                }
            }
            "weight-by-shard-size" => self.weight_by_shard_size = boolean(key, value)?,
            "trace-every" => self.trace_every = Some(num(key, value)?),
            "seed" => self.seed = num(key, value)?,
            "trials" => self.trials = num(key, value)?,
            "workers" => self.workers = num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "include-load-time" => self.include_load_time = boolean(key, value)?,
            "values" => {
                let vals = value.split(',').map(|v| num(key, v.trim())).collect::<Result<Vec<f64>>>()?;
                self.values = Some(vals);
            }
            "message-log" => self.message_log = boolean(key, value)?,
            _ => return Err(fail("unknown key".into())),
        }
        Ok(())
    }

    /// Applies a config file's keys in order.
    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let wrap = Error::in_file(path);
        let apply = |cfg: &mut Self| -> Result<()> {
            for (key, value) in parse_config(&text)? {
                cfg.set(&key, &value)?;
            }
            Ok(())
        };
        apply(self).map_err(wrap)
    }

    /// Checks domains that do not depend on the data.
    pub fn validate(&self) -> Result<()> {
        let need = |ok: bool, key: &str, msg: &str| if ok { Ok(()) } else { Err(Error::config(key, msg)) };
        need(self.nodes >= 1, "nodes", "must be at least 1")?;
        need(self.lambda > 0.0 && self.lambda.is_finite(), "lambda", "must be positive")?;
        need(self.iters >= 1, "iters", "must be at least 1")?;
        need(self.epsilon >= 0.0, "epsilon", "must be nonnegative")?;
        need(self.patience >= 1, "patience", "must be at least 1")?;
        need(self.gamma > 0.0 && self.gamma < 1.0, "gamma", "must lie strictly between 0 and 1")?;
        need(self.gossip_rounds != GossipRounds::Fixed(0), "gossip-rounds", "must be at least 1")?;
        need(self.trace_every != Some(0), "trace-every", "must be at least 1")?;
        need(self.trials >= 1, "trials", "must be at least 1")?;
        need(self.workers >= 1, "workers", "must be at least 1")?;
        match self.command {
            Command::Gadget | Command::Pegasos => {
                need(self.train.is_some(), "train", "a training file is required")?;
                for (key, path) in [("train", &self.train), ("test", &self.test)] {
                    if let Some(p) = path {
                        need(p.is_file(), key, &format!("{} does not exist", p.display()))?;
                    }
                }
            }
            Command::PushSum => {
                let ok = self.values.as_ref().is_some_and(|v| !v.is_empty());
                need(ok, "values", "pushsum needs --values")?;
            }
        }
        Ok(())
    }

    /// The resolved configuration, in a fixed key order.
    pub fn echo(&self) -> Echo {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let mut e: Echo = vec![
            ("command".into(), self.command.to_string()),
            ("train".into(), path(&self.train)),
            ("test".into(), path(&self.test)),
            ("dim".into(), self.dim.map(|d| d.to_string()).unwrap_or_else(|| "auto".into())),
            ("nodes".into(), self.nodes.to_string()),
            ("topology".into(), self.topology.clone()),
            ("lambda".into(), self.lambda.to_string()),
            ("lambda-preset".into(), self.lambda_preset.clone().unwrap_or_default()),
            ("iters".into(), self.iters.to_string()),
            ("epsilon".into(), self.epsilon.to_string()),
            ("patience".into(), self.patience.to_string()),
            ("gamma".into(), self.gamma.to_string()),
            ("gossip-mode".into(), mode_name(self.gossip_mode).into()),
            ("gossip-rounds".into(), self.gossip_rounds.to_string()),
            ("project-pre".into(), self.project_pre.to_string()),
            ("project-post".into(), self.project_post.to_string()),
            ("loss-mode".into(), loss_name(self.loss_mode).into()),
            ("weight-by-shard-size".into(), self.weight_by_shard_size.to_string()),
            ("trace-every".into(), self.trace_every.map(|t| t.to_string()).unwrap_or_else(|| "auto".into())),
            ("seed".into(), self.seed.to_string()),
            ("trials".into(), self.trials.to_string()),
            ("include-load-time".into(), self.include_load_time.to_string()),
        ];
        if let Some(v) = &self.values {
            e.push(("values".into(), v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")));
        }
        e
    }

    /// The keys the push-sum demo reads.
    pub fn echo_pushsum(&self) -> Echo {
        const USED: [&str; 7] = ["command", "topology", "gamma", "gossip-mode", "gossip-rounds", "seed", "values"];
        self.echo().into_iter().filter(|(k, _)| USED.contains(&k.as_str())).collect()
    }
}

pub fn mode_name(mode: GossipMode) -> &'static str {
    match mode {
        GossipMode::Deterministic => "deterministic",
        GossipMode::Randomized => "randomized",
    }
}

pub fn loss_name(mode: LossMode) -> &'static str {
    match mode {
        LossMode::Sample => "sample",
        LossMode::ViolatingSetMean => "violating-set-mean",
    }
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(Error::config(key, format!("expected a boolean, got `{v}`"))),
    }
}

/// Parses config text into `(key, value)` pairs, checking each key against
/// its section.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut section: Option<String> = None;
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim();
            if !KEYS.iter().any(|(_, s)| *s == name) {
                return Err(Error::Parse { line: k + 1, msg: format!("unknown section [{name}]") });
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| Error::Parse { line: k + 1, msg: format!("expected `key = value`, got `{line}`") })?;
        let key = key.trim();
        let home = KEYS.iter().find(|(name, _)| *name == key).map(|&(_, s)| s);
        match (home, section.as_deref()) {
            (None, _) => return Err(Error::config(key, "unknown key")),
            (Some(home), Some(sec)) if home != sec => {
                return Err(Error::config(key, format!("belongs in [{home}], found in [{sec}]")));
            }
            _ => {}
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}
