use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::ToPrimitive;

use super::{ChemicalSymbol, DescriptorError, DescriptorSpace, EdgeConfig};
use crate::chemgraph::{decompose, AdjacencyConfig, ChemicalGraph, ElementSpec};

/// Descriptor values of one graph before they are laid out in a space.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDescriptors {
    pub n_heavy: usize,
    pub rank: usize,
    pub n_int: usize,
    /// Sum of mass* over all atoms, hydrogens included.
    pub mass_total: i64,
    pub n_atoms: usize,
    /// Index d-1 counts heavy atoms of suppressed degree d.
    pub dg: [usize; 4],
    pub dg_int: [usize; 4],
    /// Interior bonds of multiplicity 2 and 3.
    pub bd_int: [usize; 2],
    pub na_int: BTreeMap<ElementSpec, usize>,
    pub na_ex: BTreeMap<ElementSpec, usize>,
    pub ec: BTreeMap<EdgeConfig, usize>,
    pub fc: BTreeMap<String, usize>,
    pub ac_lf: BTreeMap<AdjacencyConfig, usize>,
}

pub fn raw_descriptors(g: &ChemicalGraph, rho: usize) -> Result<RawDescriptors, DescriptorError> {
    let view = g.suppress_hydrogens();
    let dec = decompose(g, rho)?;
    let rank = g.rank()?;

    let mut dg = [0; 4];
    for v in 0..view.len() {
        let d = view.degree(v);
        if (1..=4).contains(&d) {
            dg[d - 1] += 1;
        }
    }

    let mut int_deg = vec![0usize; g.len()];
    let mut bd_int = [0; 2];
    let mut ec = BTreeMap::new();
    let symbol = |a: usize| ChemicalSymbol {
        element: g.atom(a).element.clone(),
        degree: view.degree(view.index_of[a].unwrap()) as u8,
    };
    for &bi in &dec.interior_edges {
        let b = g.bonds()[bi];
        int_deg[b.u] += 1;
        int_deg[b.v] += 1;
        if b.order >= 2 {
            bd_int[b.order as usize - 2] += 1;
        }
        *ec.entry(EdgeConfig::new(symbol(b.u), symbol(b.v), b.order)).or_insert(0) += 1;
    }
    let mut dg_int = [0; 4];
    let mut na_int = BTreeMap::new();
    for &a in &dec.interior {
        if (1..=4).contains(&int_deg[a]) {
            dg_int[int_deg[a] - 1] += 1;
        }
        *na_int.entry(g.atom(a).element.clone()).or_insert(0) += 1;
    }
    let mut na_ex = BTreeMap::new();
    for a in (0..g.len()).filter(|&a| !dec.is_interior(a)) {
        *na_ex.entry(g.atom(a).element.clone()).or_insert(0) += 1;
    }
    let mut fc = BTreeMap::new();
    for t in dec.fringe_trees.values() {
        *fc.entry(t.canonical_code().to_string()).or_insert(0) += 1;
    }
    // leaf edges of the suppressed graph; an isolated edge is one leaf edge, taken in
    // its smaller orientation
    let mut ac_lf = BTreeMap::new();
    for (u, v, order) in view.edges.iter().copied() {
        let cfg = |leaf: usize, nb: usize| AdjacencyConfig {
            leaf: g.atom(view.heavy[leaf]).element.clone(),
            neighbor: g.atom(view.heavy[nb]).element.clone(),
            order,
        };
        let found = match (view.degree(u) == 1, view.degree(v) == 1) {
            (true, true) => vec![cfg(u, v).min(cfg(v, u))],
            (true, false) => vec![cfg(u, v)],
            (false, true) => vec![cfg(v, u)],
            (false, false) => vec![],
        };
        for c in found {
            *ac_lf.entry(c).or_insert(0) += 1;
        }
    }
    Ok(RawDescriptors {
        n_heavy: view.len(),
        rank,
        n_int: dec.interior.len(),
        mass_total: g.total_mass_star(),
        n_atoms: g.len(),
        dg,
        dg_int,
        bd_int,
        na_int,
        na_ex,
        ec,
        fc,
        ac_lf,
    })
}

/// The K descriptor values of a graph; all integral except the mass average.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    pub values: Vec<Ratio<i64>>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

pub fn featurize(g: &ChemicalGraph, space: &DescriptorSpace) -> Result<FeatureVector, DescriptorError> {
    let r = raw_descriptors(g, space.rho)?;
    let int = |n: usize| Ratio::from_integer(n as i64);
    let mut v = vec![Ratio::from_integer(0); space.k()];
    v[0] = int(r.n_heavy);
    v[1] = int(r.rank);
    v[2] = int(r.n_int);
    v[3] = Ratio::new(r.mass_total, r.n_atoms as i64);
    for d in 0..4 {
        v[4 + d] = int(r.dg[d]);
        v[8 + d] = int(r.dg_int[d]);
    }
    v[12] = int(r.bd_int[0]);
    v[13] = int(r.bd_int[1]);
    let missing = |what: String| DescriptorError::OutOfSpace(what);
    for (e, n) in &r.na_int {
        v[space.index_na_int(e).ok_or_else(|| missing(format!("interior element {e}")))?] = int(*n);
    }
    for (e, n) in &r.na_ex {
        v[space.index_na_ex(e).ok_or_else(|| missing(format!("exterior element {e}")))?] = int(*n);
    }
    for (c, n) in &r.ec {
        v[space.index_ec(c).ok_or_else(|| missing(format!("edge configuration {c}")))?] = int(*n);
    }
    for (c, n) in &r.fc {
        v[space.index_fc(c).ok_or_else(|| missing(format!("fringe configuration {c}")))?] = int(*n);
    }
    for (c, n) in &r.ac_lf {
        v[space.index_ac_lf(c).ok_or_else(|| missing(format!("leaf adjacency configuration {c}")))?] = int(*n);
    }
    Ok(FeatureVector { values: v })
}
