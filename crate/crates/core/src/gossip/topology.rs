use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

const MAX_GENERATOR_ATTEMPTS: usize = 10_000;

/// An undirected simple graph over nodes `0..m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    neighbors: Vec<Vec<usize>>,
}

impl Topology {
    /// Builds a graph from undirected edges. Self-loops, duplicates (in either
    /// orientation) and out-of-range endpoints are rejected. Connectivity is
    /// not required here; see [`Topology::is_connected`].
    pub fn from_edges(m: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidTopology("no nodes".into()));
        }
        let mut seen = BTreeSet::new();
        let mut neighbors = alloc::vec![Vec::new(); m];
        for (a, b) in edges {
            if a >= m || b >= m {
                return Err(Error::InvalidTopology(format!("edge ({a}, {b}) outside 0..{m}")));
            }
            if a == b {
                return Err(Error::InvalidTopology(format!("self-loop at {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidTopology(format!("duplicate edge ({a}, {b})")));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }
        Ok(Topology { neighbors })
    }

    /// Cycle over `m` nodes (a single edge for `m = 2`, no edges for `m = 1`).
    pub fn ring(m: usize) -> Result<Self> {
        let edges: Vec<(usize, usize)> = match m {
            0 | 1 => Vec::new(),
            2 => alloc::vec![(0, 1)],
            _ => (0..m).map(|i| (i, (i + 1) % m)).collect(),
        };
        Topology::from_edges(m, edges)
    }

    pub fn complete(m: usize) -> Result<Self> {
        Topology::from_edges(m, (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))))
    }

    /// Hub 0 joined to `leaves` leaves.
    pub fn star(leaves: usize) -> Result<Self> {
        Topology::from_edges(leaves + 1, (1..=leaves).map(|j| (0, j)))
    }

    pub fn path(m: usize) -> Result<Self> {
        Topology::from_edges(m, (1..m).map(|j| (j - 1, j)))
    }

    /// A connected simple `k`-regular graph drawn by repeated random pairing of
    /// node stubs. Requires `k < m` and `k * m` even.
    pub fn random_k_regular(m: usize, k: usize, seed: u64) -> Result<Self> {
        if k == 0 || k >= m || !(k * m).is_multiple_of(2) {
            return Err(Error::param("k", format!("no connected {k}-regular graph on {m} nodes")));
        }
        let mut rng = rng::topology_stream(seed);
        for _ in 0..MAX_GENERATOR_ATTEMPTS {
            let mut stubs: Vec<usize> = (0..m).flat_map(|i| core::iter::repeat_n(i, k)).collect();
            stubs.shuffle(&mut rng);
            let mut edges = BTreeSet::new();
            let simple = stubs.chunks(2).all(|p| p[0] != p[1] && edges.insert((p[0].min(p[1]), p[0].max(p[1]))));
            if !simple {
                continue;
            }
            let topo = Topology::from_edges(m, edges)?;
            if topo.is_connected() {
                return Ok(topo);
            }
        }
        Err(Error::InvalidTopology(format!("gave up drawing a connected {k}-regular graph on {m} nodes")))
    }

    /// G(m, p), redrawn until connected.
    pub fn erdos_renyi(m: usize, p: f64, seed: u64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::param("p", "edge probability must be in (0, 1]"));
        }
        let mut rng = rng::topology_stream(seed);
        for _ in 0..MAX_GENERATOR_ATTEMPTS {
            let mut edges = Vec::new();
            for i in 0..m {
                for j in i + 1..m {
                    if rng.gen::<f64>() < p {
                        edges.push((i, j));
                    }
                }
            }
            let topo = Topology::from_edges(m, edges)?;
            if topo.is_connected() {
                return Ok(topo);
            }
        }
        Err(Error::InvalidTopology(format!("gave up drawing a connected G({m}, {p})")))
    }

    pub fn nodes(&self) -> usize {
        self.neighbors.len()
    }

    /// Sorted neighbor list of `node`.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.neighbors[node].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors.get(a).is_some_and(|n| n.binary_search(&b).is_ok())
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(i, n)| n.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        let m = self.nodes();
        let mut seen = alloc::vec![false; m];
        let mut stack = alloc::vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.neighbors[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == m
    }

    /// The same graph with node `i` renamed `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.nodes() {
            return Err(Error::param("perm", "length must equal node count"));
        }
        Topology::from_edges(self.nodes(), self.edges().map(|(a, b)| (perm[a], perm[b])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_edges() {
        assert!(Topology::from_edges(3, [(0, 0)]).is_err());
        assert!(Topology::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(Topology::from_edges(3, [(0, 3)]).is_err());
        assert!(Topology::from_edges(0, []).is_err());
    }

    #[test]
    fn connectivity() {
        assert!(Topology::ring(5).unwrap().is_connected());
        assert!(Topology::ring(1).unwrap().is_connected());
        assert!(!Topology::from_edges(4, [(0, 1), (2, 3)]).unwrap().is_connected());
    }

    #[test]
    fn generators_shapes() {
        let r = Topology::ring(4).unwrap();
        assert!((0..4).all(|i| r.degree(i) == 2));
        assert_eq!(Topology::ring(2).unwrap().edge_count(), 1);
        let c = Topology::complete(6).unwrap();
        assert_eq!(c.edge_count(), 15);
        let s = Topology::star(3).unwrap();
        assert_eq!(s.degree(0), 3);
        for seed in 0..20 {
            let g = Topology::random_k_regular(10, 3, seed).unwrap();
            assert!(g.is_connected());
            assert!((0..10).all(|i| g.degree(i) == 3));
            assert!(Topology::erdos_renyi(12, 0.3, seed).unwrap().is_connected());
        }
        assert!(Topology::random_k_regular(5, 3, 0).is_err());
        assert!(Topology::erdos_renyi(5, 0.0, 0).is_err());
    }

    #[test]
    fn generators_are_seeded() {
        assert_eq!(Topology::erdos_renyi(15, 0.2, 9).unwrap(), Topology::erdos_renyi(15, 0.2, 9).unwrap());
        assert_eq!(Topology::random_k_regular(12, 4, 2).unwrap(), Topology::random_k_regular(12, 4, 2).unwrap());
    }
}
