use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A sparse vector addresses more features than the dense side holds.
    DimensionMismatch { expected: usize, found: usize },
    /// Sparse entries violate the canonical form.
    InvalidSparse(&'static str),
    /// A NaN or infinite value where only finite values are allowed.
    NonFinite,
    EmptyDataset,
    /// A parameter outside its domain.
    InvalidParameter { name: &'static str, reason: String },
    InvalidTopology(String),
    Disconnected,
    /// Mixing matrix entries fail the doubly stochastic contract.
    InvalidMixingMatrix(String),
    /// More nodes requested than there are instances.
    TooFewInstances { nodes: usize, instances: usize },
    ShardCountMismatch { shards: usize, nodes: usize },
    /// A node addressed a peer it has no link to.
    SimulationFault { round: u64, src: usize, dst: usize },
    /// Convergence queried before any iteration completed.
    NotStarted,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: have {expected} dense slots, input needs {found}")
            }
            Error::InvalidSparse(why) => write!(f, "invalid sparse vector: {why}"),
            Error::NonFinite => f.write_str("non-finite value"),
            Error::EmptyDataset => f.write_str("empty dataset"),
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::InvalidTopology(why) => write!(f, "invalid topology: {why}"),
            Error::Disconnected => f.write_str("topology is not connected"),
            Error::InvalidMixingMatrix(why) => write!(f, "invalid mixing matrix: {why}"),
            Error::TooFewInstances { nodes, instances } => {
                write!(f, "cannot split {instances} instances over {nodes} nodes")
            }
            Error::ShardCountMismatch { shards, nodes } => {
                write!(f, "{shards} shards for a {nodes}-node topology")
            }
            Error::SimulationFault { round, src, dst } => {
                write!(f, "round {round}: node {src} addressed non-neighbor {dst}")
            }
            Error::NotStarted => f.write_str("no iteration has completed yet"),
        }
    }
}

impl core::error::Error for Error {}
