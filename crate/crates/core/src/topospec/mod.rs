//! Topological specifications: seed graph, element and fringe-tree catalogs and
//! numeric bounds that restrict the graphs an inference run may produce.

mod check;
mod spec;

pub use check::{check_graph_satisfies, find_embedding, fringe_histogram, Clause, Embedding, SatisfactionReport};
pub use spec::{
    AcBound, Bounds, EdgeClass, OrderedEdge, SeedEdge, SeedGraph, SeedVertex, SpecDocument, TopologicalSpecification,
    SPEC_VERSION,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("malformed specification: {0}")]
    Schema(String),
    #[error("invalid specification: {0}")]
    Invalid(String),
}
