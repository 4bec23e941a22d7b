use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::SpecError;
use crate::chemgraph::{AdjacencyConfig, ElementSpec, RootedFringeTree};

pub const SPEC_VERSION: u32 = 1;

/// Inclusive `[lb, ub]`, written as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds(pub usize, pub usize);

impl Bounds {
    pub fn lb(&self) -> usize {
        self.0
    }

    pub fn ub(&self) -> usize {
        self.1
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0 <= x && x <= self.1
    }
}

/// How a seed edge may be realised, derived from its length bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeClass {
    /// Replaced by a path of length at least 2.
    AtLeastTwo,
    /// Used directly or replaced by a path.
    AtLeastOne,
    /// Used directly or dropped.
    Optional,
    /// Used directly.
    Exact,
}

impl EdgeClass {
    pub fn of(length: Bounds) -> Result<Self, SpecError> {
        match (length.0, length.1) {
            (1, 1) => Ok(EdgeClass::Exact),
            (0, 1) => Ok(EdgeClass::Optional),
            (1, u) if u >= 2 => Ok(EdgeClass::AtLeastOne),
            (l, u) if l >= 2 && u >= l => Ok(EdgeClass::AtLeastTwo),
            (l, u) => Err(SpecError::Invalid(format!("edge length bounds [{l}, {u}] fit no edge class"))),
        }
    }

    /// Whether the edge can be replaced by a path through extra interior vertices.
    pub fn has_path(&self) -> bool {
        matches!(self, EdgeClass::AtLeastTwo | EdgeClass::AtLeastOne)
    }

    /// Whether the edge can appear as a single bond between its seed vertices.
    pub fn can_be_direct(&self) -> bool {
        !matches!(self, EdgeClass::AtLeastTwo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedVertex {
    /// Elements this vertex may take.
    pub elements: Vec<ElementSpec>,
    /// Canonical codes of the fringe trees allowed at this vertex.
    pub fringe: Vec<String>,
    /// Whether a leaf path may (ub = 1) or must (lb = 1) hang here.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf_path: Option<Bounds>,
    /// Height bounds for the tree rooted here.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<Bounds>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedEdge {
    pub u: usize,
    pub v: usize,
    pub length: Bounds,
    /// Leaf paths on the internal vertices of the replacing path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf_branches: Option<Bounds>,
    /// Bounds on the largest tree height over internal vertices of the path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<Bounds>,
    /// Bonds of multiplicity 2 on the realised edge or path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub double: Option<Bounds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triple: Option<Bounds>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedGraph {
    pub vertices: Vec<SeedVertex>,
    pub edges: Vec<SeedEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcBound {
    pub config: AdjacencyConfig,
    pub bounds: Bounds,
}

/// Raw document as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecDocument {
    pub version: u32,
    pub rho: usize,
    pub n_lb: usize,
    pub n_star: usize,
    pub nint: Bounds,
    /// Slots for path vertices; defaults to `nint.ub - |seed vertices|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_t: Option<usize>,
    /// Slots for leaf-path vertices; same default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_f: Option<usize>,
    pub seed: SeedGraph,
    pub lambda_int: Vec<ElementSpec>,
    pub lambda_ex: Vec<ElementSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub na: BTreeMap<ElementSpec, Bounds>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub na_int: BTreeMap<ElementSpec, Bounds>,
    /// Fringe trees allowed at path and leaf-path vertices.
    pub fringe_edge: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fc: BTreeMap<String, Bounds>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ac_lf: Vec<AcBound>,
    /// Bounds on heavy atoms of hydrogen-suppressed degree 1..=4.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dg: Option<[Bounds; 4]>,
    /// Bounds on interior atoms of interior degree 1..=4.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dg_int: Option<[Bounds; 4]>,
    /// Upper bound on the average mass* over all atoms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_ub: Option<i64>,
}

/// A seed edge in model order, with endpoints oriented so that `tail < head`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedEdge {
    /// Position in the input edge list.
    pub source: usize,
    pub tail: usize,
    pub head: usize,
    pub class: EdgeClass,
    pub length: Bounds,
}

/// A validated specification together with its derived constants. Indices are
/// 0-based: seed edges are ordered paths-only first, then path-or-direct, optional
/// and finally exact edges, each class in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologicalSpecification {
    pub doc: SpecDocument,
    pub t_c: usize,
    pub t_t: usize,
    pub t_f: usize,
    pub m_c: usize,
    /// Edges that may be replaced by a path are `0..k_c`; of them `0..k_tilde` must be.
    pub k_c: usize,
    pub k_tilde: usize,
    pub edges: Vec<OrderedEdge>,
    /// Seed vertices that may carry a leaf path; leaf colour `c < t_tilde_c` belongs
    /// to `leaf_vertices[c]`, colours `t_tilde_c + i` to path slot `i`.
    pub leaf_vertices: Vec<usize>,
    pub c_f: usize,
    pub seed_rank: usize,
    /// Every fringe code in a vertex set or the edge set, sorted.
    pub fringe_all: Vec<String>,
    pub trees: BTreeMap<String, RootedFringeTree>,
    pub lambda: Vec<ElementSpec>,
}

fn check_bounds(what: &str, b: Bounds) -> Result<(), SpecError> {
    if b.0 > b.1 {
        return Err(SpecError::Invalid(format!("{what}: lower bound {} exceeds upper bound {}", b.0, b.1)));
    }
    Ok(())
}

fn connected(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut comps = n;
    for (u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a] = b;
            comps -= 1;
        }
    }
    comps <= 1
}

impl TopologicalSpecification {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let doc: SpecDocument = serde_json::from_str(text).map_err(|e| SpecError::Schema(e.to_string()))?;
        Self::new(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.doc).expect("specification serializes")
    }

    /// sha256 of the compact JSON document.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_string(&self.doc).expect("specification serializes")))
    }

    pub fn new(doc: SpecDocument) -> Result<Self, SpecError> {
        let bad = |s: String| Err(SpecError::Invalid(s));
        if doc.version != SPEC_VERSION {
            return bad(format!("unsupported version {}", doc.version));
        }
        if doc.rho < 1 {
            return bad("rho must be at least 1".into());
        }
        check_bounds("nint", doc.nint)?;
        if doc.nint.0 < 2 || doc.nint.1 > doc.n_star {
            return bad(format!("nint bounds must lie in [2, n_star = {}]", doc.n_star));
        }
        if doc.n_lb > doc.n_star || doc.n_lb < doc.nint.0 {
            return bad("n_lb must lie in [nint lower bound, n_star]".into());
        }
        let t_c = doc.seed.vertices.len();
        if t_c == 0 {
            return bad("seed graph has no vertices".into());
        }
        if t_c > doc.nint.1 {
            return bad("more seed vertices than the interior upper bound".into());
        }
        let t_t = doc.t_t.unwrap_or(doc.nint.1 - t_c);
        let t_f = doc.t_f.unwrap_or(doc.nint.1 - t_c);

        // elements
        let mut seen = BTreeSet::new();
        for e in &doc.lambda_int {
            if e.is_hydrogen() {
                return bad("hydrogen cannot be an interior element".into());
            }
            if !seen.insert(e) {
                return bad(format!("{e} listed twice in lambda_int"));
            }
        }
        let mut seen = BTreeSet::new();
        for e in &doc.lambda_ex {
            if !seen.insert(e) {
                return bad(format!("{e} listed twice in lambda_ex"));
            }
        }
        let lambda: Vec<ElementSpec> =
            doc.lambda_int.iter().chain(&doc.lambda_ex).cloned().collect::<BTreeSet<_>>().into_iter().collect();
        for (e, b) in &doc.na {
            check_bounds(&format!("na({e})"), *b)?;
            if !lambda.contains(e) {
                return bad(format!("na bound for {e}, which is in neither element set"));
            }
        }
        for (e, b) in &doc.na_int {
            check_bounds(&format!("na_int({e})"), *b)?;
            if !doc.lambda_int.contains(e) {
                return bad(format!("na_int bound for non-interior element {e}"));
            }
        }

        // fringe trees
        let mut trees = BTreeMap::new();
        let mut add_tree = |code: &String| -> Result<(), SpecError> {
            if trees.contains_key(code) {
                return Ok(());
            }
            let t = RootedFringeTree::from_code(code).map_err(|e| SpecError::Invalid(e.to_string()))?;
            if t.root_element().is_hydrogen() {
                return Err(SpecError::Invalid(format!("fringe tree {code} is rooted at hydrogen")));
            }
            if t.height() > doc.rho {
                return Err(SpecError::Invalid(format!("fringe tree {code} is higher than rho = {}", doc.rho)));
            }
            if !doc.lambda_int.contains(t.root_element()) {
                return Err(SpecError::Invalid(format!("root of {code} is not an interior element")));
            }
            for e in t.non_root_element_counts().keys() {
                if !doc.lambda_ex.contains(e) {
                    return Err(SpecError::Invalid(format!("{code} contains {e}, which is not an exterior element")));
                }
            }
            trees.insert(code.clone(), t);
            Ok(())
        };
        for (i, v) in doc.seed.vertices.iter().enumerate() {
            if v.fringe.is_empty() {
                return bad(format!("seed vertex {i} allows no fringe tree"));
            }
            for c in &v.fringe {
                add_tree(c)?;
            }
        }
        for c in &doc.fringe_edge {
            add_tree(c)?;
        }
        for (c, b) in &doc.fc {
            check_bounds(&format!("fc({c})"), *b)?;
            if !trees.contains_key(c) {
                return bad(format!("fc bound for {c}, which no fringe set contains"));
            }
        }
        for a in &doc.ac_lf {
            check_bounds(&format!("ac_lf({})", a.config), a.bounds)?;
        }
        for (name, arr) in [("dg", &doc.dg), ("dg_int", &doc.dg_int)] {
            if let Some(arr) = arr {
                for (d, b) in arr.iter().enumerate() {
                    check_bounds(&format!("{name}({})", d + 1), *b)?;
                }
            }
        }
        if let Some(m) = doc.mass_ub {
            if m <= 0 {
                return bad("mass_ub must be positive".into());
            }
        }

        // seed vertices
        let mut leaf_vertices = Vec::new();
        for (i, v) in doc.seed.vertices.iter().enumerate() {
            if v.elements.is_empty() {
                return bad(format!("seed vertex {i} allows no element"));
            }
            for e in &v.elements {
                if !doc.lambda_int.contains(e) {
                    return bad(format!("seed vertex {i} allows {e}, which is not an interior element"));
                }
            }
            if let Some(b) = v.leaf_path {
                check_bounds(&format!("leaf_path of seed vertex {i}"), b)?;
                if b.1 > 1 {
                    return bad(format!("leaf_path of seed vertex {i} must lie in [0, 1]"));
                }
                if b.1 == 1 {
                    leaf_vertices.push(i);
                }
            }
            if let Some(b) = v.height {
                check_bounds(&format!("height of seed vertex {i}"), b)?;
            }
        }

        // seed edges
        let mut edges = Vec::new();
        for (j, e) in doc.seed.edges.iter().enumerate() {
            if e.u >= t_c || e.v >= t_c || e.u == e.v {
                return bad(format!("seed edge {j} has bad endpoints ({}, {})", e.u, e.v));
            }
            check_bounds(&format!("length of seed edge {j}"), e.length)?;
            let class = EdgeClass::of(e.length)?;
            if class.has_path() && e.length.0.max(2) - 1 > t_t {
                return bad(format!("seed edge {j} needs more path vertices than t_t = {t_t}"));
            }
            for (what, b) in [("leaf_branches", e.leaf_branches), ("height", e.height), ("double", e.double), ("triple", e.triple)] {
                if let Some(b) = b {
                    check_bounds(&format!("{what} of seed edge {j}"), b)?;
                }
            }
            if !class.has_path() && (e.leaf_branches.is_some() || e.height.is_some()) {
                return bad(format!("seed edge {j} cannot hold a path, so leaf_branches and height do not apply"));
            }
            edges.push(OrderedEdge { source: j, tail: e.u.min(e.v), head: e.u.max(e.v), class, length: e.length });
        }
        edges.sort_by_key(|e| (e.class, e.source));
        let m_c = edges.len();
        let k_c = edges.iter().filter(|e| e.class.has_path()).count();
        let k_tilde = edges.iter().filter(|e| e.class == EdgeClass::AtLeastTwo).count();
        if !connected(t_c, edges.iter().map(|e| (e.tail, e.head))) {
            return bad("seed graph is disconnected".into());
        }
        if !connected(t_c, edges.iter().filter(|e| e.class != EdgeClass::Optional).map(|e| (e.tail, e.head))) {
            return bad("seed graph falls apart without its optional edges".into());
        }
        let seed_rank = m_c + 1 - t_c;
        let c_f = leaf_vertices.len() + t_t;
        let fringe_all = trees.keys().cloned().collect();
        Ok(TopologicalSpecification {
            doc,
            t_c,
            t_t,
            t_f,
            m_c,
            k_c,
            k_tilde,
            edges,
            leaf_vertices,
            c_f,
            seed_rank,
            fringe_all,
            trees,
            lambda,
        })
    }

    pub fn rho(&self) -> usize {
        self.doc.rho
    }

    pub fn n_star(&self) -> usize {
        self.doc.n_star
    }

    pub fn t_tilde_c(&self) -> usize {
        self.leaf_vertices.len()
    }

    /// Leaf colour of seed vertex `i`, if it may carry a leaf path.
    pub fn leaf_color(&self, i: usize) -> Option<usize> {
        self.leaf_vertices.iter().position(|&v| v == i)
    }

    pub fn leaf_path_bounds(&self, i: usize) -> Bounds {
        self.doc.seed.vertices[i].leaf_path.unwrap_or(Bounds(0, 0))
    }

    pub fn vertex_height(&self, i: usize) -> Bounds {
        self.doc.seed.vertices[i].height.unwrap_or(Bounds(0, self.doc.n_star))
    }

    /// Colour-count bounds for path edge `k`: path length minus one, capped by `t_t`.
    pub fn path_vertices(&self, k: usize) -> Bounds {
        let l = self.edges[k].length;
        let lb = match self.edges[k].class {
            EdgeClass::AtLeastTwo => l.0 - 1,
            _ => 0,
        };
        Bounds(lb, (l.1 - 1).min(self.t_t))
    }

    pub fn edge_doc(&self, k: usize) -> &SeedEdge {
        &self.doc.seed.edges[self.edges[k].source]
    }

    pub fn edge_leaf_branches(&self, k: usize) -> Bounds {
        let ub = self.path_vertices(k).1;
        self.edge_doc(k).leaf_branches.unwrap_or(Bounds(0, ub))
    }

    pub fn edge_height(&self, k: usize) -> Bounds {
        self.edge_doc(k).height.unwrap_or(Bounds(0, self.doc.n_star))
    }

    /// Bounds on bonds of multiplicity `m` (2 or 3) on realised seed edge `k`.
    pub fn edge_bonds(&self, k: usize, m: u8) -> Bounds {
        let e = self.edge_doc(k);
        let b = if m == 2 { e.double } else { e.triple };
        b.unwrap_or(Bounds(0, self.doc.nint.1))
    }

    /// Fringe trees allowed at seed vertex `i`.
    pub fn vertex_fringe(&self, i: usize) -> &[String] {
        &self.doc.seed.vertices[i].fringe
    }

    pub fn fc_bounds(&self, code: &str) -> Bounds {
        self.doc.fc.get(code).copied().unwrap_or(Bounds(0, self.doc.n_star))
    }

    pub fn ac_lf_bounds(&self, a: &AdjacencyConfig) -> Bounds {
        self.doc.ac_lf.iter().find(|x| &x.config == a).map(|x| x.bounds).unwrap_or(Bounds(0, self.doc.n_star))
    }

    pub fn na_bounds(&self, e: &ElementSpec) -> Bounds {
        let default = if e.is_hydrogen() { Bounds(0, 4 * self.doc.n_star) } else { Bounds(0, self.doc.n_star) };
        self.doc.na.get(e).copied().unwrap_or(default)
    }

    pub fn na_int_bounds(&self, e: &ElementSpec) -> Bounds {
        self.doc.na_int.get(e).copied().unwrap_or(Bounds(0, self.doc.nint.1))
    }

    pub fn dg_bounds(&self, d: usize) -> Bounds {
        self.doc.dg.map(|a| a[d - 1]).unwrap_or(Bounds(0, self.doc.n_star))
    }

    pub fn dg_int_bounds(&self, d: usize) -> Bounds {
        self.doc.dg_int.map(|a| a[d - 1]).unwrap_or(Bounds(0, self.doc.nint.1))
    }

    /// Upper bound M on the average mass*; defaults to the heaviest element in play.
    pub fn mass_ub(&self) -> i64 {
        self.doc.mass_ub.unwrap_or_else(|| self.lambda.iter().map(|e| e.mass_star()).max().unwrap_or(1))
    }

    /// Ordered edge indices incident to seed vertex `i` as tail (`out`) or head.
    pub fn incident(&self, i: usize, out: bool) -> Vec<usize> {
        (0..self.m_c).filter(|&k| if out { self.edges[k].tail == i } else { self.edges[k].head == i }).collect()
    }
}
