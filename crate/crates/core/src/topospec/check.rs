use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use super::{Bounds, EdgeClass, TopologicalSpecification};
use crate::chemgraph::{decompose, ChemicalGraph, TwoLayeredDecomposition};
use crate::descriptors::raw_descriptors;

/// Search steps allowed when looking for a seed embedding.
const SEARCH_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clause {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SatisfactionReport {
    pub clauses: Vec<Clause>,
}

impl SatisfactionReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Clause> {
        self.clauses.iter().filter(|c| !c.passed).collect()
    }

    pub fn clause(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.clauses.push(Clause { name: name.into(), passed, detail: detail.into() });
    }

    fn bound(&mut self, name: impl Into<String>, value: usize, b: Bounds) {
        let ok = b.contains(value);
        self.push(name, ok, format!("{value} in [{}, {}]", b.0, b.1));
    }
}

impl fmt::Display for SatisfactionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{} {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail)?;
        }
        write!(f, "overall: {}", if self.passed() { "pass" } else { "FAIL" })
    }
}

/// Where the seed graph sits inside the interior of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    /// Atom hosting each seed vertex.
    pub seed_atoms: Vec<usize>,
    /// Per ordered seed edge: the atoms of its realisation from tail to head, or
    /// `None` when an optional edge is dropped.
    pub edge_paths: Vec<Option<Vec<usize>>>,
    /// Leaf paths as (attachment atom, atoms from the attachment outwards).
    pub leaf_paths: Vec<(usize, Vec<usize>)>,
}

/// Checks every bound of the specification on `g` and searches for an embedding of
/// the seed graph into its interior. The search is exhaustive backtracking.
pub fn check_graph_satisfies(spec: &TopologicalSpecification, g: &ChemicalGraph) -> SatisfactionReport {
    let mut rep = SatisfactionReport { clauses: vec![] };
    let raw = match raw_descriptors(g, spec.rho()) {
        Ok(r) => r,
        Err(e) => {
            rep.push("descriptors", false, e.to_string());
            return rep;
        }
    };
    let d = &spec.doc;
    rep.bound("n", raw.n_heavy, Bounds(d.n_lb, d.n_star));
    rep.bound("n_int", raw.n_int, d.nint);

    let bad_int: Vec<String> = raw.na_int.keys().filter(|e| !d.lambda_int.contains(e)).map(|e| e.to_string()).collect();
    rep.push("interior_elements", bad_int.is_empty(), format!("outside lambda_int: {bad_int:?}"));
    let bad_ex: Vec<String> = raw.na_ex.keys().filter(|e| !d.lambda_ex.contains(e)).map(|e| e.to_string()).collect();
    rep.push("exterior_elements", bad_ex.is_empty(), format!("outside lambda_ex: {bad_ex:?}"));
    for e in &spec.lambda {
        let total = raw.na_int.get(e).copied().unwrap_or(0) + raw.na_ex.get(e).copied().unwrap_or(0);
        rep.bound(format!("na({e})"), total, spec.na_bounds(e));
    }
    for e in &d.lambda_int {
        rep.bound(format!("na_int({e})"), raw.na_int.get(e).copied().unwrap_or(0), spec.na_int_bounds(e));
    }
    let unknown: Vec<&String> = raw.fc.keys().filter(|c| !spec.trees.contains_key(*c)).collect();
    rep.push("fringe_catalog", unknown.is_empty(), format!("fringe trees outside every allowed set: {unknown:?}"));
    for c in &spec.fringe_all {
        rep.bound(format!("fc({c})"), raw.fc.get(c).copied().unwrap_or(0), spec.fc_bounds(c));
    }
    for a in &d.ac_lf {
        rep.bound(format!("ac_lf({})", a.config), raw.ac_lf.get(&a.config).copied().unwrap_or(0), a.bounds);
    }
    for deg in 1..=4 {
        rep.bound(format!("dg({deg})"), raw.dg[deg - 1], spec.dg_bounds(deg));
        rep.bound(format!("dg_int({deg})"), raw.dg_int[deg - 1], spec.dg_int_bounds(deg));
    }
    let m = spec.mass_ub();
    let ok = raw.mass_total <= m * raw.n_atoms as i64;
    rep.push("mass_average", ok, format!("{}/{} <= {m}", raw.mass_total, raw.n_atoms));

    match decompose(g, spec.rho()) {
        Ok(dec) => {
            let (found, detail) = match find_embedding(spec, g, &dec) {
                Ok(emb) => (true, format!("seed vertices at atoms {:?}", emb.seed_atoms)),
                Err(why) => (false, why),
            };
            rep.push("embedding", found, detail);
        }
        Err(e) => rep.push("embedding", false, e.to_string()),
    }
    rep
}

struct Search<'a> {
    spec: &'a TopologicalSpecification,
    g: &'a ChemicalGraph,
    dec: &'a TwoLayeredDecomposition,
    adj: HashMap<usize, Vec<(usize, usize)>>,
    used_atom: BTreeSet<usize>,
    used_bond: BTreeSet<usize>,
    seed_atoms: Vec<usize>,
    paths: Vec<Option<Vec<usize>>>,
    path_vertices: usize,
    steps: usize,
    best: Option<Vec<String>>,
}

/// First embedding that meets every embedding-dependent bound, or a description of
/// the closest miss.
pub fn find_embedding(
    spec: &TopologicalSpecification,
    g: &ChemicalGraph,
    dec: &TwoLayeredDecomposition,
) -> Result<Embedding, String> {
    if dec.interior.is_empty() {
        return Err("interior is empty".into());
    }
    let mut adj: HashMap<usize, Vec<(usize, usize)>> = dec.interior.iter().map(|&a| (a, vec![])).collect();
    for &bi in &dec.interior_edges {
        let b = g.bonds()[bi];
        adj.get_mut(&b.u).unwrap().push((b.v, bi));
        adj.get_mut(&b.v).unwrap().push((b.u, bi));
    }
    let mut s = Search {
        spec,
        g,
        dec,
        adj,
        used_atom: BTreeSet::new(),
        used_bond: BTreeSet::new(),
        seed_atoms: vec![],
        paths: vec![],
        path_vertices: 0,
        steps: 0,
        best: None,
    };
    match s.place_vertex(0) {
        Some(e) => Ok(e),
        None if s.steps >= SEARCH_LIMIT => Err("search limit reached".into()),
        None => Err(match s.best {
            Some(f) => format!("closest embedding fails: {}", f.join("; ")),
            None => "no placement of the seed graph into the interior".into(),
        }),
    }
}

impl Search<'_> {
    fn tick(&mut self) -> bool {
        self.steps += 1;
        self.steps < SEARCH_LIMIT
    }

    fn place_vertex(&mut self, i: usize) -> Option<Embedding> {
        if i == self.spec.t_c {
            return self.route_edge(0);
        }
        let allowed = &self.spec.doc.seed.vertices[i].elements;
        for &a in &self.dec.interior.clone() {
            if !self.tick() {
                return None;
            }
            if self.used_atom.contains(&a) || !allowed.contains(&self.g.atom(a).element) {
                continue;
            }
            self.used_atom.insert(a);
            self.seed_atoms.push(a);
            if let Some(e) = self.place_vertex(i + 1) {
                return Some(e);
            }
            self.seed_atoms.pop();
            self.used_atom.remove(&a);
        }
        None
    }

    fn route_edge(&mut self, k: usize) -> Option<Embedding> {
        if k == self.spec.m_c {
            return self.finish();
        }
        let e = self.spec.edges[k].clone();
        let (s, t) = (self.seed_atoms[e.tail], self.seed_atoms[e.head]);
        if e.class == EdgeClass::Optional {
            self.paths.push(None);
            if let Some(x) = self.route_edge(k + 1) {
                return Some(x);
            }
            self.paths.pop();
        }
        let max_len = if e.class.has_path() { e.length.1.min(self.spec.t_t + 1) } else { 1 };
        let min_len = if e.class.can_be_direct() { 1 } else { e.length.0 };
        let mut walk = vec![s];
        self.extend(k, t, min_len, max_len, &mut walk, &mut vec![])
    }

    /// Depth-first enumeration of simple paths from the last atom of `walk` to `target`
    /// through unused interior atoms.
    fn extend(
        &mut self,
        k: usize,
        target: usize,
        min_len: usize,
        max_len: usize,
        walk: &mut Vec<usize>,
        bonds: &mut Vec<usize>,
    ) -> Option<Embedding> {
        if !self.tick() {
            return None;
        }
        let here = *walk.last().unwrap();
        let nbrs = self.adj[&here].clone();
        for (w, bi) in nbrs {
            if self.used_bond.contains(&bi) {
                continue;
            }
            let len = bonds.len() + 1;
            if w == target {
                if len < min_len {
                    continue;
                }
                let internal = walk.len() - 1;
                walk.push(w);
                for &b in bonds.iter().chain(std::iter::once(&bi)) {
                    self.used_bond.insert(b);
                }
                self.paths.push(Some(walk.clone()));
                self.path_vertices += internal;
                if let Some(x) = self.route_edge(k + 1) {
                    return Some(x);
                }
                self.path_vertices -= internal;
                self.paths.pop();
                for &b in bonds.iter().chain(std::iter::once(&bi)) {
                    self.used_bond.remove(&b);
                }
                walk.pop();
                continue;
            }
            if len >= max_len || self.used_atom.contains(&w) || self.path_vertices + walk.len() > self.spec.t_t {
                continue;
            }
            self.used_atom.insert(w);
            walk.push(w);
            bonds.push(bi);
            if let Some(x) = self.extend(k, target, min_len, max_len, walk, bonds) {
                return Some(x);
            }
            bonds.pop();
            walk.pop();
            self.used_atom.remove(&w);
        }
        None
    }

    /// Splits the rest of the interior into leaf paths and checks the bounds that
    /// depend on the embedding.
    fn finish(&mut self) -> Option<Embedding> {
        let spec = self.spec;
        let rest: BTreeSet<usize> = self.dec.interior.iter().copied().filter(|a| !self.used_atom.contains(a)).collect();
        let mut fails = Vec::new();
        // where each path-internal atom sits: (edge index, position)
        let mut internal_of: HashMap<usize, usize> = HashMap::new();
        for (k, p) in self.paths.iter().enumerate() {
            if let Some(p) = p {
                for &a in &p[1..p.len() - 1] {
                    internal_of.insert(a, k);
                }
            }
        }
        let seed_index: HashMap<usize, usize> = self.seed_atoms.iter().enumerate().map(|(i, &a)| (a, i)).collect();

        let mut leaf_paths = Vec::new();
        let mut seen = BTreeSet::new();
        let mut attach_used = BTreeSet::new();
        for &bi in &self.dec.interior_edges {
            let b = self.g.bonds()[bi];
            if !self.used_bond.contains(&bi) && !rest.contains(&b.u) && !rest.contains(&b.v) {
                return self.record(vec![format!("bond {}-{} is not explained by the seed graph", b.u, b.v)]);
            }
        }
        for &start in &rest {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = vec![start];
            seen.insert(start);
            let mut i = 0;
            let mut attach = Vec::new();
            let mut inner_bonds = 0;
            while i < comp.len() {
                let x = comp[i];
                for &(w, _) in &self.adj[&x] {
                    if rest.contains(&w) {
                        inner_bonds += 1;
                        if seen.insert(w) {
                            comp.push(w);
                        }
                    } else {
                        attach.push((x, w));
                    }
                }
                i += 1;
            }
            inner_bonds /= 2;
            let is_path = inner_bonds + 1 == comp.len()
                && comp.iter().all(|x| self.adj[x].iter().filter(|(w, _)| rest.contains(w)).count() <= 2);
            if !is_path || attach.len() != 1 {
                return self.record(vec![format!("interior atoms {comp:?} do not form a leaf path")]);
            }
            let (end, host) = attach[0];
            if comp.len() > 1 && self.adj[&end].iter().filter(|(w, _)| rest.contains(w)).count() != 1 {
                return self.record(vec![format!("leaf path {comp:?} attaches at an inner atom")]);
            }
            let allowed = match seed_index.get(&host) {
                Some(&i) => spec.leaf_color(i).is_some(),
                None => internal_of.contains_key(&host),
            };
            if !allowed || !attach_used.insert(host) {
                return self.record(vec![format!("leaf path {comp:?} hangs at atom {host}, which may not carry one")]);
            }
            // order outwards from the attachment
            let mut ordered = vec![end];
            let mut prev = host;
            while ordered.len() < comp.len() {
                let cur = *ordered.last().unwrap();
                let next = self.adj[&cur].iter().map(|&(w, _)| w).find(|&w| w != prev && rest.contains(&w)).unwrap();
                prev = cur;
                ordered.push(next);
            }
            leaf_paths.push((host, ordered));
        }
        let leaf_total: usize = leaf_paths.iter().map(|(_, p)| p.len()).sum();
        if leaf_total > spec.t_f {
            fails.push(format!("{leaf_total} leaf-path atoms exceed t_f = {}", spec.t_f));
        }
        let leaf_len: HashMap<usize, usize> = leaf_paths.iter().map(|(h, p)| (*h, p.len())).collect();
        let height = |a: usize| self.dec.fringe_trees[&a].height();
        let code = |a: usize| self.dec.fringe_trees[&a].canonical_code().to_string();
        let rho = spec.rho();

        for (i, &a) in self.seed_atoms.iter().enumerate() {
            if !spec.vertex_fringe(i).contains(&code(a)) {
                fails.push(format!("fringe tree {} at seed vertex {i} is not allowed there", code(a)));
            }
            let lp = spec.leaf_path_bounds(i);
            let len = leaf_len.get(&a).copied();
            if lp.0 == 1 && len.is_none() {
                fails.push(format!("seed vertex {i} needs a leaf path"));
            }
            let ch = spec.vertex_height(i);
            if height(a) > ch.1 {
                fails.push(format!("tree height {} at seed vertex {i} above {}", height(a), ch.1));
            }
            match len {
                Some(l) if !ch.contains(l + rho) => {
                    fails.push(format!("leaf path height {} at seed vertex {i} outside [{}, {}]", l + rho, ch.0, ch.1))
                }
                None if height(a) < ch.0 => fails.push(format!("tree height {} at seed vertex {i} below {}", height(a), ch.0)),
                _ => {}
            }
        }
        for &a in internal_of.keys().chain(leaf_paths.iter().flat_map(|(_, p)| p.iter())) {
            if !spec.doc.fringe_edge.contains(&code(a)) {
                fails.push(format!("fringe tree {} at atom {a} is not in the edge set", code(a)));
            }
        }
        for (k, p) in self.paths.iter().enumerate() {
            let e = &spec.edges[k];
            let internal: &[usize] = match p {
                Some(p) if p.len() > 2 => &p[1..p.len() - 1],
                _ => &[],
            };
            if e.class.has_path() {
                let bl = internal.iter().filter(|a| leaf_len.contains_key(a)).count();
                let b = spec.edge_leaf_branches(k);
                if !b.contains(bl) {
                    fails.push(format!("{bl} leaf paths on seed edge {} outside [{}, {}]", e.source, b.0, b.1));
                }
                let ch = spec.edge_height(k);
                let hs: Vec<usize> = internal
                    .iter()
                    .map(|&a| match leaf_len.get(&a) {
                        Some(l) => l + rho,
                        None => height(a),
                    })
                    .collect();
                if let Some(&top) = hs.iter().max() {
                    if top > ch.1 || top < ch.0 {
                        fails.push(format!("largest height {top} on seed edge {} outside [{}, {}]", e.source, ch.0, ch.1));
                    }
                }
            }
            for m in [2u8, 3] {
                let count = match p {
                    Some(p) if e.class.has_path() && p.len() > 2 => self.path_orders(p).filter(|&o| o == m).count(),
                    Some(p) if !e.class.has_path() => self.path_orders(p).filter(|&o| o == m).count(),
                    _ => 0,
                };
                let b = spec.edge_bonds(k, m);
                if !b.contains(count) {
                    fails.push(format!("{count} bonds of order {m} on seed edge {} outside [{}, {}]", e.source, b.0, b.1));
                }
            }
        }
        if fails.is_empty() {
            return Some(Embedding { seed_atoms: self.seed_atoms.clone(), edge_paths: self.paths.clone(), leaf_paths });
        }
        self.record(fails)
    }

    fn path_orders<'b>(&'b self, p: &'b [usize]) -> impl Iterator<Item = u8> + 'b {
        p.windows(2).map(move |w| {
            let bi = self.adj[&w[0]].iter().find(|&&(x, _)| x == w[1]).unwrap().1;
            self.g.bonds()[bi].order
        })
    }

    fn record(&mut self, fails: Vec<String>) -> Option<Embedding> {
        if self.best.as_ref().map_or(true, |b| fails.len() < b.len()) {
            self.best = Some(fails);
        }
        None
    }
}

/// Fringe trees per interior atom, keyed by canonical code.
pub fn fringe_histogram(dec: &TwoLayeredDecomposition) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for t in dec.fringe_trees.values() {
        *m.entry(t.canonical_code().to_string()).or_insert(0) += 1;
    }
    m
}
