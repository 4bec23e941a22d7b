//! Chemical graphs: data model, molfile/JSON ingestion, hydrogen suppression and the
//! two-layered interior/exterior decomposition.

mod decompose;
mod element;
mod fringe;
mod graph;
mod sdf;

pub use decompose::{decompose, TwoLayeredDecomposition, INFINITE_HEIGHT};
pub use element::ElementSpec;
pub use fringe::{AdjacencyConfig, FringeNode, RootedFringeTree};
pub use graph::{
    cycle_rank, with_implicit_hydrogens, Atom, Bond, ChemicalGraph, EdgeJson, GraphJson, HeavyView,
    VertexJson,
};
pub use sdf::{parse_molfile, parse_sdf, parse_sdf_named, write_sdf, SdfRecordError};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("graph has no vertices")]
    Empty,
    #[error("edge references vertex {0} which does not exist")]
    UnknownVertex(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("parallel edges between {0} and {1}")]
    ParallelEdge(usize, usize),
    #[error("bond {u}-{v} has multiplicity {order}, expected 1..=3")]
    BadMultiplicity { u: usize, v: usize, order: u8 },
    #[error("ion-valence {ion_valence} at vertex {vertex} outside [-3, 3]")]
    IonValence { vertex: usize, ion_valence: i8 },
    #[error("valence violation at vertex {vertex} ({element}): bonds sum to {found}, expected {expected}")]
    Valence { vertex: usize, element: String, expected: i32, found: i32 },
    #[error("vertex {vertex} has {degree} non-hydrogen neighbours")]
    HeavyDegree { vertex: usize, degree: usize },
    #[error("hydrogen at vertex {0} is not a single-bonded leaf")]
    Hydrogen(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("branch parameter must be at least 1, got {0}")]
    Rho(usize),
    #[error("malformed fringe code: {0}")]
    FringeCode(String),
    #[error("JSON graph: {0}")]
    Json(String),
    #[error("molfile: {0}")]
    Molfile(String),
}
