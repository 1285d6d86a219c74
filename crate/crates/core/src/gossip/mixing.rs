use alloc::format;
use alloc::vec::Vec;

use super::Topology;
use crate::error::{Error, Result};

const STOCHASTIC_TOL: f64 = 1e-12;

/// A nonnegative doubly stochastic `m x m` matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMatrix {
    m: usize,
    entries: Vec<f64>,
}

impl MixingMatrix {
    /// Validates nonnegativity and unit row and column sums (to 1e-12).
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidMixingMatrix("matrix must be square and nonempty".into()));
        }
        let b = MixingMatrix { m, entries: rows.into_iter().flatten().collect() };
        b.check_stochastic()?;
        Ok(b)
    }

    pub fn nodes(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.m..(i + 1) * self.m]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }

    pub fn column_sum(&self, j: usize) -> f64 {
        (0..self.m).map(|i| self.get(i, j)).sum()
    }

    /// Rejects any positive off-diagonal entry that is not an edge of `topo`.
    pub fn check_support(&self, topo: &Topology) -> Result<()> {
        if topo.nodes() != self.m {
            return Err(Error::InvalidMixingMatrix(format!("{} rows for {} nodes", self.m, topo.nodes())));
        }
        for i in 0..self.m {
            for j in 0..self.m {
                if i != j && self.get(i, j) > 0.0 && !topo.has_edge(i, j) {
                    return Err(Error::InvalidMixingMatrix(format!("weight on non-edge ({i}, {j})")));
                }
            }
        }
        Ok(())
    }

    /// Nodes `i` may send to: every `j != i` with `b[i][j] > 0`.
    pub fn out_links(&self) -> Vec<Vec<usize>> {
        (0..self.m)
            .map(|i| (0..self.m).filter(|&j| j != i && self.get(i, j) > 0.0).collect())
            .collect()
    }

    fn check_stochastic(&self) -> Result<()> {
        if let Some(bad) = self.entries.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidMixingMatrix(format!("entry {bad} is not a probability")));
        }
        for k in 0..self.m {
            let (r, c) = (self.row_sum(k), self.column_sum(k));
            if (r - 1.0).abs() > STOCHASTIC_TOL || (c - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::InvalidMixingMatrix(format!("row/column {k} sums to {r}/{c}")));
            }
        }
        Ok(())
    }
}

/// Metropolis–Hastings weights: `1 / (1 + max(deg i, deg j))` on each edge, the
/// remaining mass on the diagonal. Symmetric, hence doubly stochastic on any
/// connected graph, regular or not.
pub fn build_metropolis_matrix(topo: &Topology) -> Result<MixingMatrix> {
    if !topo.is_connected() {
        return Err(Error::Disconnected);
    }
    let m = topo.nodes();
    let mut entries = alloc::vec![0.0; m * m];
    for i in 0..m {
        let mut off = 0.0;
        for &j in topo.neighbors(i) {
            let w = 1.0 / (1 + topo.degree(i).max(topo.degree(j))) as f64;
            entries[i * m + j] = w;
            off += w;
        }
        entries[i * m + i] = 1.0 - off;
    }
    let b = MixingMatrix { m, entries };
    b.check_stochastic()?;
    Ok(b)
}
