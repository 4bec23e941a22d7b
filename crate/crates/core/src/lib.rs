//! Two-layered chemical graph descriptors, Lasso property prediction and
//! MILP-based inference of chemical graphs with a target property value.

pub mod chemgraph;
pub mod descriptors;
pub mod regression;
pub mod milp;
pub mod topospec;
