use std::collections::BTreeMap;

use super::{ChemicalGraph, GraphError, RootedFringeTree};

/// Height of vertices that leaf peeling never removes.
pub const INFINITE_HEIGHT: usize = usize::MAX;

/// Interior/exterior split of a chemical graph for a branch parameter `rho`.
#[derive(Debug, Clone)]
pub struct TwoLayeredDecomposition {
    pub rho: usize,
    /// Peeling height per atom; `None` for hydrogens.
    pub heights: Vec<Option<usize>>,
    /// Interior atoms, ascending.
    pub interior: Vec<usize>,
    /// Bonds with both ends interior.
    pub interior_edges: Vec<usize>,
    /// Non-hydrogen atoms outside the interior, ascending.
    pub exterior: Vec<usize>,
    pub hydrogens: Vec<usize>,
    /// Fringe tree rooted at each interior atom.
    pub fringe_trees: BTreeMap<usize, RootedFringeTree>,
    /// Interior atom whose fringe tree contains the atom (itself for interior atoms).
    pub owner: Vec<Option<usize>>,
}

impl TwoLayeredDecomposition {
    pub fn is_interior(&self, atom: usize) -> bool {
        self.interior.binary_search(&atom).is_ok()
    }
}

/// Peels leaves of the hydrogen-suppressed graph round by round. Atoms removed in
/// round `r` get height `r`; atoms never removed get [`INFINITE_HEIGHT`]. The interior
/// is every atom of height at least `rho`.
pub fn decompose(g: &ChemicalGraph, rho: usize) -> Result<TwoLayeredDecomposition, GraphError> {
    if rho < 1 {
        return Err(GraphError::Rho(rho));
    }
    let view = g.suppress_hydrogens();
    let n = view.len();
    let mut deg: Vec<usize> = (0..n).map(|v| view.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut height = vec![INFINITE_HEIGHT; n];
    let mut round = 0;
    loop {
        let layer: Vec<usize> = (0..n).filter(|&v| !removed[v] && deg[v] <= 1).collect();
        if layer.is_empty() {
            break;
        }
        for &v in &layer {
            height[v] = round;
            removed[v] = true;
        }
        for &v in &layer {
            for &(w, _) in &view.adj[v] {
                if !removed[w] {
                    deg[w] -= 1;
                }
            }
        }
        round += 1;
    }

    let mut heights = vec![None; g.len()];
    let mut interior_mask = vec![false; g.len()];
    for (v, &a) in view.heavy.iter().enumerate() {
        heights[a] = Some(height[v]);
        interior_mask[a] = height[v] >= rho;
    }
    let interior: Vec<usize> = (0..g.len()).filter(|&a| interior_mask[a]).collect();
    let exterior = (0..g.len()).filter(|&a| !g.is_hydrogen(a) && !interior_mask[a]).collect();
    let hydrogens = (0..g.len()).filter(|&a| g.is_hydrogen(a)).collect();
    let interior_edges = g
        .bonds()
        .iter()
        .enumerate()
        .filter(|(_, b)| interior_mask[b.u] && interior_mask[b.v])
        .map(|(i, _)| i)
        .collect();

    let mut fringe_trees = BTreeMap::new();
    let mut owner = vec![None; g.len()];
    for &r in &interior {
        owner[r] = Some(r);
        let blocked = |w: usize| interior_mask[w];
        let tree = RootedFringeTree::from_graph(g, r, &blocked)?;
        fringe_trees.insert(r, tree);
        let mut stack = vec![r];
        while let Some(x) = stack.pop() {
            for &(w, _) in g.neighbors(x) {
                if !interior_mask[w] && owner[w].is_none() {
                    owner[w] = Some(r);
                    stack.push(w);
                }
            }
        }
    }
    Ok(TwoLayeredDecomposition { rho, heights, interior, interior_edges, exterior, hydrogens, fringe_trees, owner })
}
