//! Error types shared across the library.

use thiserror::Error;

/// Structured rejection reasons for graph construction and operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeynError {
    /// A half-edge is missing from or duplicated in the vertex or edge partition.
    #[error("not a partition: half-edge {0} is missing or duplicated in the {1} partition")]
    NonPartition(String, &'static str),
    /// A corolla has fewer than three half-edges.
    #[error("corolla of size {0} (every vertex part must have cardinality at least 3)")]
    SmallCorolla(usize),
    /// An edge part has more than two half-edges.
    #[error("edge part of size {0} (edge parts have cardinality at most 2)")]
    BadEdgePart(usize),
    /// The referenced internal edge does not exist.
    #[error("no such internal edge: {0}")]
    NoSuchEdge(usize),
    /// The operation requires a connected graph.
    #[error("graph is disconnected")]
    Disconnected,
    /// A subgraph operation received a subgraph that is not full at its vertices.
    #[error("subgraph is not full at vertices")]
    NotFullAtVertices,
    /// A subgraph operation received a subgraph with a bridge.
    #[error("subgraph has a bridge")]
    BridgedSubgraph,
    /// The edge is part of the spanning tree, so it has no fundamental cycle.
    #[error("edge {0} lies in the spanning tree")]
    EdgeInTree(usize),
    /// No compatible spanning forest exists for the requested cut data.
    #[error("no compatible spanning forest")]
    NoCompatibleForest,
    /// Two incidence monomials from different contexts were combined.
    #[error("incidence monomials belong to different contexts")]
    ContextMismatch,
    /// The forest is not contained in the supplied spanning tree.
    #[error("forest is not contained in the spanning tree")]
    ForestNotInTree,
    /// An insertion argument has no matching insertion place.
    #[error("no insertion place matches the argument structure: {0}")]
    StructureMismatch(String),
    /// Free-form validation error (file parsing, CLI input).
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, FeynError>;
