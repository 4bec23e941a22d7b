use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{ElementSpec, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub element: ElementSpec,
    /// Shift of the bond budget: incident multiplicities sum to `valence + ion_valence`.
    pub ion_valence: i8,
}

impl Atom {
    pub fn new(element: ElementSpec) -> Self {
        Atom { element, ion_valence: 0 }
    }

    pub fn with_ion(element: ElementSpec, ion_valence: i8) -> Self {
        Atom { element, ion_valence }
    }

    pub fn bond_budget(&self) -> i32 {
        self.element.valence() as i32 + self.ion_valence as i32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bond {
    pub u: usize,
    pub v: usize,
    pub order: u8,
}

impl Bond {
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// A hydrogen-explicit chemical graph satisfying the valence condition.
///
/// Built only through [`ChemicalGraph::new`], which checks connectivity, simple-graph
/// structure, the valence condition at every atom, the degree-4 bound on the
/// hydrogen-suppressed graph and that hydrogens are single-bonded leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct ChemicalGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// Per atom: (neighbour, bond index).
    adj: Vec<Vec<(usize, usize)>>,
}

impl ChemicalGraph {
    pub fn new(atoms: Vec<Atom>, bonds: Vec<Bond>) -> Result<Self, GraphError> {
        if atoms.is_empty() {
            return Err(GraphError::Empty);
        }
        let n = atoms.len();
        let mut adj = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for (bi, b) in bonds.iter().enumerate() {
            if b.u >= n || b.v >= n {
                return Err(GraphError::UnknownVertex(b.u.max(b.v)));
            }
            if b.u == b.v {
                return Err(GraphError::SelfLoop(b.u));
            }
            if !(1..=3).contains(&b.order) {
                return Err(GraphError::BadMultiplicity { u: b.u, v: b.v, order: b.order });
            }
            if !seen.insert((b.u.min(b.v), b.u.max(b.v))) {
                return Err(GraphError::ParallelEdge(b.u, b.v));
            }
            adj[b.u].push((b.v, bi));
            adj[b.v].push((b.u, bi));
        }
        for (i, a) in atoms.iter().enumerate() {
            if !(-3..=3).contains(&a.ion_valence) {
                return Err(GraphError::IonValence { vertex: i, ion_valence: a.ion_valence });
            }
            let sum: i32 = adj[i].iter().map(|&(_, bi)| bonds[bi].order as i32).sum();
            if sum != a.bond_budget() {
                return Err(GraphError::Valence {
                    vertex: i,
                    element: a.element.to_string(),
                    expected: a.bond_budget(),
                    found: sum,
                });
            }
            if a.element.is_hydrogen() {
                if adj[i].len() > 1 {
                    return Err(GraphError::Hydrogen(i));
                }
            } else {
                let heavy = adj[i].iter().filter(|&&(w, _)| !atoms[w].element.is_hydrogen()).count();
                if heavy > 4 {
                    return Err(GraphError::HeavyDegree { vertex: i, degree: heavy });
                }
            }
        }
        let g = ChemicalGraph { atoms, bonds, adj };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.atoms.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &(w, _) in &self.adj[x] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.atoms.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// (neighbour, bond index) pairs of atom `i`.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adj[i]
    }

    pub fn is_hydrogen(&self, i: usize) -> bool {
        self.atoms[i].element.is_hydrogen()
    }

    /// Sum of mass* over all atoms, hydrogens included.
    pub fn total_mass_star(&self) -> i64 {
        self.atoms.iter().map(|a| a.element.mass_star()).sum()
    }

    pub fn suppress_hydrogens(&self) -> HeavyView {
        HeavyView::new(self)
    }

    /// Cycle rank |E| - |V| + 1 of the hydrogen-suppressed graph.
    pub fn rank(&self) -> Result<usize, GraphError> {
        let view = self.suppress_hydrogens();
        let edges: Vec<(usize, usize)> = view.edges.iter().map(|&(u, v, _)| (u, v)).collect();
        cycle_rank(view.len(), &edges)
    }

    /// Graph with atoms reordered so that atom `perm[i]` of `self` becomes atom `i`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, GraphError> {
        let mut inv = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let atoms = perm.iter().map(|&p| self.atoms[p].clone()).collect();
        let bonds = self
            .bonds
            .iter()
            .map(|b| Bond { u: inv[b.u], v: inv[b.v], order: b.order })
            .collect();
        ChemicalGraph::new(atoms, bonds)
    }

    pub fn from_json_str(text: &str) -> Result<Self, GraphError> {
        let doc: GraphJson = serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        doc.into_graph()
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self
                .atoms
                .iter()
                .enumerate()
                .map(|(i, a)| VertexJson {
                    id: i as i64,
                    element: a.element.symbol().to_string(),
                    valence: Some(a.element.valence()),
                    charge: a.ion_valence,
                })
                .collect(),
            edges: self
                .bonds
                .iter()
                .map(|b| EdgeJson { u: b.u as i64, v: b.v as i64, order: b.order })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("graph JSON serializes")
    }
}

/// Rank of an arbitrary undirected graph given by vertex count and edge list.
pub fn cycle_rank(n: usize, edges: &[(usize, usize)]) -> Result<usize, GraphError> {
    if n == 0 {
        return Ok(0);
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut components = n;
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a] = b;
            components -= 1;
        }
    }
    if components != 1 {
        return Err(GraphError::Disconnected);
    }
    Ok(edges.len() + 1 - n)
}

/// Hydrogen-suppressed view of a chemical graph.
#[derive(Debug, Clone)]
pub struct HeavyView {
    /// Graph atom index of each heavy vertex.
    pub heavy: Vec<usize>,
    /// Heavy index of each graph atom, `None` for hydrogens.
    pub index_of: Vec<Option<usize>>,
    /// Heavy-heavy edges (heavy u, heavy v, order), in bond order.
    pub edges: Vec<(usize, usize, u8)>,
    /// Graph bond index of each entry of `edges`.
    pub bond_of_edge: Vec<usize>,
    /// Per heavy vertex: (heavy neighbour, edge index).
    pub adj: Vec<Vec<(usize, usize)>>,
    pub hydrogens: Vec<usize>,
}

impl HeavyView {
    fn new(g: &ChemicalGraph) -> Self {
        let mut heavy = Vec::new();
        let mut index_of = vec![None; g.len()];
        for i in 0..g.len() {
            if !g.is_hydrogen(i) {
                index_of[i] = Some(heavy.len());
                heavy.push(i);
            }
        }
        let mut edges = Vec::new();
        let mut bond_of_edge = Vec::new();
        let mut adj = vec![Vec::new(); heavy.len()];
        for (bi, b) in g.bonds().iter().enumerate() {
            if let (Some(u), Some(v)) = (index_of[b.u], index_of[b.v]) {
                adj[u].push((v, edges.len()));
                adj[v].push((u, edges.len()));
                edges.push((u, v, b.order));
                bond_of_edge.push(bi);
            }
        }
        let hydrogens = heavy
            .iter()
            .map(|&a| g.neighbors(a).iter().filter(|&&(w, _)| g.is_hydrogen(w)).count())
            .collect();
        HeavyView { heavy, index_of, edges, bond_of_edge, adj, hydrogens }
    }

    pub fn len(&self) -> usize {
        self.heavy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heavy.is_empty()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Number of hydrogens attached to heavy vertex `v`.
    pub fn hydrogen_count(&self, v: usize) -> usize {
        self.hydrogens[v]
    }
}

/// JSON graph document: `{"vertices":[{id, element, valence, charge}], "edges":[{u, v, order}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: i64,
    pub element: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valence: Option<u8>,
    /// Ion-valence of the atom.
    #[serde(default)]
    pub charge: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub u: i64,
    pub v: i64,
    pub order: u8,
}

impl GraphJson {
    pub fn into_graph(self) -> Result<ChemicalGraph, GraphError> {
        let mut index = BTreeMap::new();
        let mut atoms = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            if index.insert(v.id, i).is_some() {
                return Err(GraphError::Json(format!("duplicate vertex id {}", v.id)));
            }
            let element = match v.valence {
                Some(val) => ElementSpec::with_valence(&v.element, val)?,
                None => ElementSpec::new(&v.element)?,
            };
            atoms.push(Atom::with_ion(element, v.charge));
        }
        let lookup = |id: i64| {
            index
                .get(&id)
                .copied()
                .ok_or_else(|| GraphError::Json(format!("edge references unknown vertex id {id}")))
        };
        let mut bonds = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            bonds.push(Bond { u: lookup(e.u)?, v: lookup(e.v)?, order: e.order });
        }
        ChemicalGraph::new(atoms, bonds)
    }
}

/// Builds a graph from heavy atoms and heavy bonds, completing every heavy atom with
/// hydrogens up to its bond budget. Convenient for fixtures and tests.
pub fn with_implicit_hydrogens(
    heavy: &[(ElementSpec, i8)],
    bonds: &[(usize, usize, u8)],
) -> Result<ChemicalGraph, GraphError> {
    let mut atoms: Vec<Atom> = heavy.iter().map(|(e, q)| Atom::with_ion(e.clone(), *q)).collect();
    let mut all_bonds: Vec<Bond> = bonds.iter().map(|&(u, v, order)| Bond { u, v, order }).collect();
    let mut used = vec![0i32; heavy.len()];
    for &(u, v, o) in bonds {
        if u >= heavy.len() || v >= heavy.len() {
            return Err(GraphError::UnknownVertex(u.max(v)));
        }
        used[u] += o as i32;
        used[v] += o as i32;
    }
    for (i, (e, q)) in heavy.iter().enumerate() {
        let budget = e.valence() as i32 + *q as i32;
        let missing = budget - used[i];
        if missing < 0 {
            return Err(GraphError::Valence {
                vertex: i,
                element: e.to_string(),
                expected: budget,
                found: used[i],
            });
        }
        for _ in 0..missing {
            let h = atoms.len();
            atoms.push(Atom::new(ElementSpec::hydrogen()));
            all_bonds.push(Bond { u: i, v: h, order: 1 });
        }
    }
    ChemicalGraph::new(atoms, all_bonds)
}
