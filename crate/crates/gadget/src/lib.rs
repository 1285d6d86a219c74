//! Files, configuration and experiments around `gadget-core`.
//!
//! - [`libsvm`]: the LIBSVM text format.
//! - [`topology`]: topology specs (`ring:4`, `erdos-renyi:0.3:7`, ...) and files.
//! - [`config`]: `key = value` experiment configs and the lambda presets.
//! - [`experiment`]: single trials, multi-seed runs and the push-sum demo.
//! - [`report`]: trace CSVs, message logs and run summaries.
//! - [`exec`]: a rayon-backed executor for node-parallel work.

pub mod config;
mod error;
pub mod exec;
pub mod experiment;
pub mod libsvm;
pub mod report;
pub mod topology;

pub use error::{Error, Result};
pub use gadget_core as core;
