//! Combinatorial invariants of self-similar group actions on directed graphs
//! and higher-rank graphs.
//!
//! The entry points are [`Graph`] / [`SelfSimilarSystem`] for ordinary directed
//! graphs (rank one, possibly with infinite-receiver edges) and
//! [`KGraphSkeleton`] / [`KSystem`] for row-finite k-graphs without sources.
//! On top of those the crate computes maximal G-tails, G-circuits without
//! entry, breaking vertices, quasi-orbit spaces, primitive-spectrum component
//! diagrams, simplicity verdicts, cycline-triple fixpoints and periodicity
//! lattices, together with naive brute-force oracles used to validate all of
//! the above on small instances.

pub mod action;
pub mod corpus;
pub mod graph;
pub mod kgraph;
pub mod lattice;
pub mod oracle;
pub mod periodicity;
pub mod spectrum;
pub mod sysspec;
pub mod tails;

mod error;

pub use action::{ElemId, GroupTable, SelfSimilarSystem};
pub use error::Error;
pub use graph::{Edge, EdgeId, Graph, GraphSpec, Multiplicity, Path, PathStep, VertexId};
pub use kgraph::{KEdge, KGraphSkeleton, KPath, KSystem};
pub use lattice::IntegerLattice;
pub use spectrum::{PrimComponent, PrimSpectrum, QuasiOrbitSpace, QuasiPoint};
pub use sysspec::SystemSpec;
pub use tails::{GCircuit, GTail, TailTag};

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
