//! Mixed-integer model of chemical graphs with a prescribed topology and predicted
//! property value, its LP-file form, solvers and the decoder back to graphs.
//!
//! Variable names are fixed so that any solver's output can be decoded: indices are
//! 1-based, e.g. `eC_3` (seed edge 3 used), `chiT_5_2` (path slot 5 has colour 2),
//! `dfrF_2_4` (leaf-path slot 2 carries fringe tree 4 of the model's catalog).

mod bnb;
mod build;
mod decode;
mod external;
mod lp;
mod model;
mod simplex;
mod solution;

pub use bnb::{propagate_bounds, solve_mini, MiniOptions};
pub use build::{
    add_bond_bounds, add_cyclical_base, add_degree, add_descriptor_linking, add_element_valence, add_fringe_trees,
    add_leaf_paths, add_multiplicity, add_normalization, add_prediction, build_model, BuildGoal, BuildOptions,
    ModelLayout, PotEdge, Slot, Sym, DEFAULT_EPSILON,
};
pub use decode::decode;
pub use external::{parse_cbc_solution, parse_highs_solution, ExternalSolver, SolutionFormat};
pub use lp::{emit_lp, parse_lp};
pub use model::{MilpModel, ObjSense, Objective, Row, Sense, Var, VarKind};
pub use simplex::{rational, solve_lp, LpOutcome, LpProblem, Scalar};
pub use solution::{check_solution, polish, Solution, SolveStatus, INTEGRALITY_TOL, RESIDUAL_TOL};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MilpError {
    #[error("invalid name {0:?}")]
    Name(String),
    #[error("duplicate name {0}")]
    Duplicate(String),
    #[error("bad bounds or coefficients for {0}")]
    Bounds(String),
    #[error("unknown variable {0}")]
    UnknownVar(String),
    #[error("LP text line {line}: {msg}")]
    Lp { line: usize, msg: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("solver exceeded {0:.1} s")]
    Timeout(f64),
    #[error("solution fails the residual check: {0}")]
    Residual(String),
    #[error("inconsistent solution: {0}")]
    Decode(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which solver [`solve`] runs.
#[derive(Debug, Clone)]
pub enum Backend {
    Mini(MiniOptions),
    External(ExternalSolver),
}

/// Solves `m`. Feasible results have their continuous part re-solved exactly with the
/// integer part fixed, and pass [`check_solution`] before they are returned; an
/// infeasible model yields a solution with status [`SolveStatus::Infeasible`].
pub fn solve(m: &MilpModel, backend: &Backend) -> Result<Solution, MilpError> {
    let raw = match backend {
        Backend::Mini(opts) => solve_mini(m, opts)?,
        Backend::External(ext) => ext.solve(m)?,
    };
    if !raw.status.has_solution() {
        return Ok(raw);
    }
    let sol = polish(m, &raw)?;
    check_solution(m, &sol)?;
    Ok(sol)
}
