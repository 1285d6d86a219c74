//! Sparse feature vectors and dense weight vectors.
//!
//! Feature indices are 1-based, as in LIBSVM files. Dense storage is 0-based:
//! feature `j` lives in dense slot `j - 1`. All accumulation runs in entry
//! order so results are bit-reproducible.

use alloc::vec::Vec;
use core::ops::Index;

use crate::error::{Error, Result};

/// A dense vector of finite `f64` values with a fixed length.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn zeros(len: usize) -> Self {
        DenseVector(alloc::vec![0.0; len])
    }

    /// Wraps `values`, rejecting NaN and infinities.
    pub fn from_vec(values: Vec<f64>) -> Result<Self> {
        if values.iter().all(|v| v.is_finite()) {
            Ok(DenseVector(values))
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// `a * self`, elementwise.
    pub fn scaled(&self, a: f64) -> DenseVector {
        DenseVector(self.0.iter().map(|v| a * v).collect())
    }

    /// `self += a * other`. Lengths must agree.
    pub fn add_scaled(&mut self, a: f64, other: &DenseVector) -> Result<()> {
        check_same_len(self, other)?;
        for (s, o) in self.0.iter_mut().zip(&other.0) {
            *s += a * o;
        }
        Ok(())
    }

    /// `self += other`. Lengths must agree.
    pub fn add_assign(&mut self, other: &DenseVector) -> Result<()> {
        check_same_len(self, other)?;
        for (s, o) in self.0.iter_mut().zip(&other.0) {
            *s += o;
        }
        Ok(())
    }

    /// Elementwise `self / d`.
    pub fn divided(&self, d: f64) -> DenseVector {
        DenseVector(self.0.iter().map(|v| v / d).collect())
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &DenseVector) -> Result<f64> {
        check_same_len(self, other)?;
        let sq: f64 = self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)).sum();
        Ok(libm::sqrt(sq))
    }

    /// Plain dense inner product.
    pub fn dot_dense(&self, other: &DenseVector) -> Result<f64> {
        check_same_len(self, other)?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl Index<usize> for DenseVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

fn check_same_len(a: &DenseVector, b: &DenseVector) -> Result<()> {
    if a.len() == b.len() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: a.len(), found: b.len() })
    }
}

/// Canonical sparse vector: strictly increasing 1-based indices, finite nonzero values.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
    dim: usize,
}

impl SparseVector {
    pub fn new(entries: Vec<(u32, f64)>, dim: usize) -> Result<Self> {
        let mut prev = 0u32;
        for &(idx, val) in &entries {
            if idx == 0 {
                return Err(Error::InvalidSparse("feature indices are 1-based"));
            }
            if idx <= prev {
                return Err(Error::InvalidSparse("indices must be strictly increasing"));
            }
            if idx as usize > dim {
                return Err(Error::InvalidSparse("index exceeds declared dimension"));
            }
            if !val.is_finite() {
                return Err(Error::NonFinite);
            }
            if val == 0.0 {
                return Err(Error::InvalidSparse("explicit zero entry"));
            }
            prev = idx;
        }
        Ok(SparseVector { entries, dim })
    }

    /// Builds a vector whose dimension is its largest index.
    pub fn from_entries(entries: Vec<(u32, f64)>) -> Result<Self> {
        let dim = entries.last().map_or(0, |&(i, _)| i as usize);
        Self::new(entries, dim)
    }

    pub fn empty(dim: usize) -> Self {
        SparseVector { entries: Vec::new(), dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    /// Largest index present, 0 when empty.
    pub fn max_index(&self) -> usize {
        self.entries.last().map_or(0, |&(i, _)| i as usize)
    }

    /// Same entries under a different declared dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        if self.max_index() > dim {
            return Err(Error::DimensionMismatch { expected: dim, found: self.max_index() });
        }
        Ok(SparseVector { entries: self.entries.clone(), dim })
    }

    pub fn densify(&self, len: usize) -> Result<DenseVector> {
        if self.dim > len {
            return Err(Error::DimensionMismatch { expected: len, found: self.dim });
        }
        let mut out = alloc::vec![0.0; len];
        for &(i, v) in &self.entries {
            out[i as usize - 1] = v;
        }
        Ok(DenseVector(out))
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.entries.iter().map(|&(_, v)| v * v).sum())
    }
}

fn check_fits(x: &SparseVector, w: &DenseVector) -> Result<()> {
    if x.dim <= w.len() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: w.len(), found: x.dim })
    }
}

/// `<x, w>` accumulated in entry order.
pub fn dot(x: &SparseVector, w: &DenseVector) -> Result<f64> {
    check_fits(x, w)?;
    Ok(dot_unchecked(x, w))
}

pub(crate) fn dot_unchecked(x: &SparseVector, w: &DenseVector) -> f64 {
    let mut acc = 0.0;
    for &(i, v) in &x.entries {
        acc += v * w.0[i as usize - 1];
    }
    acc
}

/// `a * u + b * x`, with `x` densified to `u.len()`.
pub fn scale_add(a: f64, u: &DenseVector, b: f64, x: &SparseVector) -> Result<DenseVector> {
    check_fits(x, u)?;
    let mut out = u.scaled(a);
    for &(i, v) in &x.entries {
        out.0[i as usize - 1] += b * v;
    }
    Ok(out)
}

pub fn l2_norm(w: &DenseVector) -> f64 {
    libm::sqrt(w.0.iter().map(|v| v * v).sum())
}
