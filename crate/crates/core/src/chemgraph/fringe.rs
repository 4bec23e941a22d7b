use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ChemicalGraph, ElementSpec, GraphError};

/// Leaf-edge adjacency configuration `(element of leaf, element of its neighbour, multiplicity)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdjacencyConfig {
    pub leaf: ElementSpec,
    pub neighbor: ElementSpec,
    pub order: u8,
}

impl fmt::Display for AdjacencyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}_{}", self.leaf, self.neighbor, self.order)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FringeNode {
    pub element: ElementSpec,
    pub ion_valence: i8,
    pub parent: Option<usize>,
    /// Multiplicity of the edge to the parent, 0 for the root.
    pub order: u8,
    pub children: Vec<usize>,
}

/// A chemical rooted tree, node 0 being the root.
#[derive(Debug, Clone)]
pub struct RootedFringeTree {
    nodes: Vec<FringeNode>,
    code: String,
}

impl PartialEq for RootedFringeTree {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for RootedFringeTree {}

fn bond_char(order: u8) -> char {
    match order {
        1 => '-',
        2 => '=',
        _ => '#',
    }
}

impl RootedFringeTree {
    /// Builds a tree from nodes listed with parents before children.
    pub fn new(nodes: Vec<FringeNode>) -> Result<Self, GraphError> {
        if nodes.is_empty() || nodes[0].parent.is_some() {
            return Err(GraphError::FringeCode("tree needs a parentless root at index 0".into()));
        }
        let mut nodes = nodes;
        for n in nodes.iter_mut() {
            n.children.clear();
        }
        for i in 1..nodes.len() {
            let p = nodes[i]
                .parent
                .filter(|&p| p < i)
                .ok_or_else(|| GraphError::FringeCode(format!("node {i} has no earlier parent")))?;
            if !(1..=3).contains(&nodes[i].order) {
                return Err(GraphError::FringeCode(format!("node {i} has bond order {}", nodes[i].order)));
            }
            nodes[p].children.push(i);
        }
        let code = encode(&nodes, 0);
        Ok(RootedFringeTree { nodes, code })
    }

    /// The tree hanging at `root`, made of `root` and every atom reachable from it
    /// without entering a vertex for which `blocked` holds.
    pub fn from_graph(g: &ChemicalGraph, root: usize, blocked: &dyn Fn(usize) -> bool) -> Result<Self, GraphError> {
        let atom = g.atom(root);
        let mut nodes = vec![FringeNode {
            element: atom.element.clone(),
            ion_valence: atom.ion_valence,
            parent: None,
            order: 0,
            children: vec![],
        }];
        let mut origin = vec![root];
        let mut i = 0;
        while i < nodes.len() {
            let x = origin[i];
            let up = nodes[i].parent.map(|p| origin[p]);
            for &(w, bi) in g.neighbors(x) {
                if Some(w) == up || blocked(w) {
                    continue;
                }
                let a = g.atom(w);
                nodes.push(FringeNode {
                    element: a.element.clone(),
                    ion_valence: a.ion_valence,
                    parent: Some(i),
                    order: g.bonds()[bi].order,
                    children: vec![],
                });
                origin.push(w);
            }
            i += 1;
            if nodes.len() > g.len() {
                return Err(GraphError::FringeCode("fringe region is not a tree".into()));
            }
        }
        Self::new(nodes)
    }

    /// Parses a canonical code back into a tree.
    pub fn from_code(code: &str) -> Result<Self, GraphError> {
        let bytes = code.as_bytes();
        let mut pos = 0;
        let mut nodes = Vec::new();
        parse_node(bytes, &mut pos, None, 0, &mut nodes)?;
        if pos != bytes.len() {
            return Err(GraphError::FringeCode(format!("trailing input in {code}")));
        }
        let t = Self::new(nodes)?;
        if t.code != code {
            return Err(GraphError::FringeCode(format!("{code} is not in canonical form")));
        }
        Ok(t)
    }

    /// Canonical code: equal for two trees exactly when they are root-preserving
    /// isomorphic with matching elements, ion-valences and multiplicities.
    pub fn canonical_code(&self) -> &str {
        &self.code
    }

    pub fn nodes(&self) -> &[FringeNode] {
        &self.nodes
    }

    pub fn root(&self) -> &FringeNode {
        &self.nodes[0]
    }

    pub fn root_element(&self) -> &ElementSpec {
        &self.nodes[0].element
    }

    pub fn root_ion_valence(&self) -> i8 {
        self.nodes[0].ion_valence
    }

    fn is_h(&self, i: usize) -> bool {
        self.nodes[i].element.is_hydrogen()
    }

    /// Number of non-root non-hydrogen vertices.
    pub fn non_root_heavy_count(&self) -> usize {
        (1..self.nodes.len()).filter(|&i| !self.is_h(i)).count()
    }

    pub fn hydrogen_count(&self) -> usize {
        (1..self.nodes.len()).filter(|&i| self.is_h(i)).count()
    }

    /// Height of the hydrogen-suppressed tree.
    pub fn height(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        let mut h = 0;
        for i in 1..self.nodes.len() {
            depth[i] = depth[self.nodes[i].parent.unwrap()] + 1;
            if !self.is_h(i) {
                h = h.max(depth[i]);
            }
        }
        h
    }

    pub fn root_heavy_children(&self) -> usize {
        self.nodes[0].children.iter().filter(|&&c| !self.is_h(c)).count()
    }

    pub fn root_hydrogen_children(&self) -> usize {
        self.nodes[0].children.iter().filter(|&&c| self.is_h(c)).count()
    }

    /// Sum of multiplicities of the edges at the root.
    pub fn root_bond_sum(&self) -> u32 {
        self.nodes[0].children.iter().map(|&c| self.nodes[c].order as u32).sum()
    }

    /// Element frequencies over non-root vertices, hydrogens included.
    pub fn non_root_element_counts(&self) -> BTreeMap<ElementSpec, usize> {
        let mut m = BTreeMap::new();
        for n in &self.nodes[1..] {
            *m.entry(n.element.clone()).or_insert(0) += 1;
        }
        m
    }

    /// Hydrogen-suppressed degree histogram (index = degree) of non-root heavy vertices,
    /// counting the edge to the parent.
    pub fn non_root_degree_counts(&self) -> [usize; 5] {
        let mut out = [0; 5];
        for i in 1..self.nodes.len() {
            if self.is_h(i) {
                continue;
            }
            let d = 1 + self.nodes[i].children.iter().filter(|&&c| !self.is_h(c)).count();
            out[d.min(4)] += 1;
        }
        out
    }

    /// Adjacency configurations of non-root heavy leaves of the suppressed tree.
    pub fn leaf_configs(&self) -> Vec<AdjacencyConfig> {
        let mut out = Vec::new();
        for i in 1..self.nodes.len() {
            let n = &self.nodes[i];
            if n.element.is_hydrogen() || n.children.iter().any(|&c| !self.is_h(c)) {
                continue;
            }
            let p = n.parent.unwrap();
            out.push(AdjacencyConfig {
                leaf: n.element.clone(),
                neighbor: self.nodes[p].element.clone(),
                order: n.order,
            });
        }
        out.sort();
        out
    }
}

fn label(n: &FringeNode) -> String {
    let mut s = n.element.to_string();
    if n.ion_valence != 0 {
        s.push_str(&format!("^{:+}", n.ion_valence));
    }
    s
}

fn encode(nodes: &[FringeNode], i: usize) -> String {
    let mut s = label(&nodes[i]);
    let mut kids: Vec<String> = nodes[i]
        .children
        .iter()
        .map(|&c| format!("{}{}", bond_char(nodes[c].order), encode(nodes, c)))
        .collect();
    if !kids.is_empty() {
        kids.sort();
        s.push('(');
        for k in kids {
            s.push_str(&k);
        }
        s.push(')');
    }
    s
}

fn parse_node(
    b: &[u8],
    pos: &mut usize,
    parent: Option<usize>,
    order: u8,
    nodes: &mut Vec<FringeNode>,
) -> Result<(), GraphError> {
    let err = |msg: &str, at: usize| GraphError::FringeCode(format!("{msg} at byte {at}"));
    let start = *pos;
    if *pos >= b.len() || !b[*pos].is_ascii_uppercase() {
        return Err(err("expected element symbol", *pos));
    }
    *pos += 1;
    while *pos < b.len() && b[*pos].is_ascii_lowercase() {
        *pos += 1;
    }
    if *pos < b.len() && b[*pos] == b'_' {
        *pos += 1;
        while *pos < b.len() && b[*pos].is_ascii_digit() {
            *pos += 1;
        }
    }
    let element: ElementSpec = std::str::from_utf8(&b[start..*pos]).unwrap().parse()?;
    let mut ion_valence = 0i8;
    if *pos < b.len() && b[*pos] == b'^' {
        let sign = match b.get(*pos + 1) {
            Some(b'+') => 1,
            Some(b'-') => -1,
            _ => return Err(err("expected ion-valence sign", *pos + 1)),
        };
        let digit = b.get(*pos + 2).filter(|c| c.is_ascii_digit()).ok_or_else(|| err("expected digit", *pos + 2))?;
        ion_valence = sign * (digit - b'0') as i8;
        *pos += 3;
    }
    let me = nodes.len();
    nodes.push(FringeNode { element, ion_valence, parent, order, children: vec![] });
    if *pos < b.len() && b[*pos] == b'(' {
        *pos += 1;
        loop {
            let o = match b.get(*pos) {
                Some(b'-') => 1,
                Some(b'=') => 2,
                Some(b'#') => 3,
                Some(b')') => break,
                _ => return Err(err("expected bond or ')'", *pos)),
            };
            *pos += 1;
            parse_node(b, pos, Some(me), o, nodes)?;
        }
        *pos += 1;
        if nodes.len() == me + 1 {
            return Err(err("empty child list", *pos - 1));
        }
    }
    Ok(())
}

impl fmt::Display for RootedFringeTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}
