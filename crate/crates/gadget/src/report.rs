//! CSV traces, message logs and key = value run summaries.
//!
//! Numbers use Rust's shortest round-trip formatting, which is
//! locale-independent, so reruns produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use gadget_core::gadget::TraceRow;
use gadget_core::simnet::LogEntry;
use gadget_core::svm::PegasosTracePoint;

use crate::error::{Error, Result};

/// Ordered `key = value` pairs.
pub type Echo = Vec<(String, String)>;

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Trace CSV text: header `t,mean_objective,mean_test_error,max_delta` then one
/// objective column per node and, when test errors were recorded, one test
/// error column per node.
pub fn trace_csv(trace: &[TraceRow]) -> Result<String> {
    let first = trace.first().ok_or(Error::EmptyTrace)?;
    let m = first.node_objectives.len();
    let with_test = first.node_test_errors.is_some();
    let mut out = String::from("t,mean_objective,mean_test_error,max_delta");
    for i in 0..m {
        write!(out, ",node{i}_objective").unwrap();
    }
    if with_test {
        for i in 0..m {
            write!(out, ",node{i}_test_error").unwrap();
        }
    }
    out.push('\n');
    for row in trace {
        write!(out, "{},{},{},{}", row.t, row.mean_objective, opt(row.mean_test_error), row.max_delta).unwrap();
        for v in &row.node_objectives {
            write!(out, ",{v}").unwrap();
        }
        for v in row.node_test_errors.iter().flatten() {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes [`trace_csv`] to `path`.
pub fn write_trace_csv(trace: &[TraceRow], path: impl AsRef<Path>) -> Result<()> {
    write(path, &trace_csv(trace)?)
}

/// Like [`write_trace_csv`] with the run's resolved configuration as leading
/// `# key = value` comment lines.
pub fn write_trace_csv_with_echo(trace: &[TraceRow], echo: &Echo, path: impl AsRef<Path>) -> Result<()> {
    write(path, &(comment_block(echo) + &trace_csv(trace)?))
}

/// Centralized trace CSV: `t,objective,train_error`.
pub fn pegasos_trace_csv(trace: &[PegasosTracePoint]) -> Result<String> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let mut out = String::from("t,objective,train_error\n");
    for p in trace {
        writeln!(out, "{},{},{}", p.t, p.objective, p.train_error).unwrap();
    }
    Ok(out)
}

/// Message log CSV: `round,src,dst,payload_norm,weight`.
pub fn message_log_csv(log: &[LogEntry]) -> String {
    let mut out = String::from("round,src,dst,payload_norm,weight\n");
    for e in log {
        writeln!(out, "{},{},{},{},{}", e.round, e.src, e.dst, e.payload_norm, e.weight).unwrap();
    }
    out
}

pub fn comment_block(echo: &Echo) -> String {
    echo.iter().map(|(k, v)| format!("# {k} = {v}\n")).collect()
}

pub fn summary_text(sections: &[(&str, &Echo)]) -> String {
    let mut out = String::new();
    for (k, (name, entries)) in sections.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        writeln!(out, "[{name}]").unwrap();
        for (key, value) in entries.iter() {
            writeln!(out, "{key} = {value}").unwrap();
        }
    }
    out
}

pub fn write(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
