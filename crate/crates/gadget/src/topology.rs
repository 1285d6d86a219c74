//! Topology specs and files.
//!
//! A spec is one of `ring[:m]`, `complete[:m]`, `star[:m]`, `path[:m]`,
//! `random-k-regular:k[:seed]`, `erdos-renyi:p[:seed]`, or a path to a topology
//! file. Omitted node counts fall back to `--nodes`; omitted seeds to the run
//! seed.
//!
//! A topology file holds the node count on its first line, then one `i j`
//! edge per line with 0-based ids. Blank lines and `#` comments are skipped.

use std::fs;
use std::path::Path;

use gadget_core::Topology;

use crate::error::{Error, Result};

pub fn parse_topology_spec(spec: &str, nodes: usize, seed: u64) -> Result<Topology> {
    let bad = |msg: String| Error::config("topology", msg);
    let mut parts = spec.split(':');
    let kind = parts.next().unwrap_or_default();
    let args: Vec<&str> = parts.collect();
    let count = |args: &[&str]| -> Result<usize> {
        match args {
            [] => Ok(nodes),
            [m] => {
                let m: usize = m.parse().map_err(|_| bad(format!("bad node count `{m}`")))?;
                if m != nodes {
                    return Err(bad(format!("spec names {m} nodes but the run has {nodes}")));
                }
                Ok(m)
            }
            _ => Err(bad(format!("too many arguments in `{spec}`"))),
        }
    };
    let seed_arg = |arg: Option<&&str>| -> Result<u64> {
        arg.map_or(Ok(seed), |s| s.parse().map_err(|_| bad(format!("bad seed `{s}`"))))
    };

    let topo = match kind {
        "ring" => Topology::ring(count(&args)?)?,
        "complete" => Topology::complete(count(&args)?)?,
        "path" => Topology::path(count(&args)?)?,
        "star" => Topology::star(count(&args)?.saturating_sub(1))?,
        "random-k-regular" | "erdos-renyi" => {
            if args.is_empty() || args.len() > 2 {
                return Err(bad(format!("`{kind}` takes a parameter and an optional seed")));
            }
            let seed = seed_arg(args.get(1))?;
            if kind == "random-k-regular" {
                let k = args[0].parse().map_err(|_| bad(format!("bad degree `{}`", args[0])))?;
                Topology::random_k_regular(nodes, k, seed)?
            } else {
                let p = args[0].parse().map_err(|_| bad(format!("bad probability `{}`", args[0])))?;
                Topology::erdos_renyi(nodes, p, seed)?
            }
        }
        _ if Path::new(spec).is_file() => {
            let topo = load_topology(spec)?;
            if topo.nodes() != nodes {
                return Err(bad(format!("{spec} has {} nodes but the run has {nodes}", topo.nodes())));
            }
            topo
        }
        _ => return Err(bad(format!("unknown topology `{spec}`"))),
    };
    Ok(topo)
}

pub fn load_topology(path: impl AsRef<Path>) -> Result<Topology> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_topology(&text).map_err(Error::in_file(path))
}

/// Parses topology file text. The graph must be connected.
pub fn parse_topology(text: &str) -> Result<Topology> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line, first) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing node count".into() })?;
    let m: usize = first.parse().map_err(|_| Error::Parse { line, msg: format!("bad node count `{first}`") })?;
    let mut edges = Vec::new();
    for (line, l) in lines {
        let ids: Vec<&str> = l.split_whitespace().collect();
        let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse { line, msg: format!("bad node id `{s}`") });
        match ids.as_slice() {
            [a, b] => edges.push((parse(a)?, parse(b)?)),
            _ => return Err(Error::Parse { line, msg: "expected `i j`".into() }),
        }
    }
    let topo = Topology::from_edges(m, edges)?;
    if !topo.is_connected() {
        return Err(gadget_core::Error::Disconnected.into());
    }
    Ok(topo)
}

/// Writes a topology in the file format [`parse_topology`] reads.
pub fn format_topology(topo: &Topology) -> String {
    let mut out = format!("{}\n", topo.nodes());
    for (a, b) in topo.edges() {
        out.push_str(&format!("{a} {b}\n"));
    }
    out
}
