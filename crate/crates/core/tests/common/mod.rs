#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use chemlp::chemgraph::{with_implicit_hydrogens, ChemicalGraph, ElementSpec, FringeNode, RootedFringeTree};
use chemlp::descriptors::DescriptorSpace;
use rand::seq::SliceRandom;
use rand::Rng;

pub mod e2e;
pub mod encode;
pub mod fixtures;
pub mod lasso;
pub mod roundtrip;

/// CBC from `CHEMLP_CBC`, the PuLP wheel or the PATH.
pub fn cbc_path() -> Option<String> {
    let candidates = [
        std::env::var("CHEMLP_CBC").ok(),
        Some("/usr/local/lib/python3.10/dist-packages/pulp/solverdir/cbc/linux/i64/cbc".to_string()),
        Some("/usr/bin/cbc".to_string()),
    ];
    candidates.into_iter().flatten().find(|p| std::path::Path::new(p).is_file())
}

/// (symbol, valence, ion-valence) choices for heavy atoms, carbon-heavy.
const KINDS: &[(&str, u8, i8)] = &[
    ("C", 4, 0),
    ("C", 4, 0),
    ("C", 4, 0),
    ("C", 4, 0),
    ("N", 3, 0),
    ("O", 2, 0),
    ("O", 2, 0),
    ("Cl", 1, 0),
    ("S", 2, 0),
    ("S", 6, 0),
    ("N", 3, 1),
    ("O", 2, -1),
];

/// A random valid chemical graph with 1..=max_heavy non-hydrogen atoms.
pub fn random_graph<R: Rng>(rng: &mut R, max_heavy: usize) -> ChemicalGraph {
    let n = rng.gen_range(1..=max_heavy);
    let mut deg = vec![0usize; n];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 1..n {
        let open: Vec<usize> = (0..i).filter(|&j| deg[j] < 4).collect();
        let j = *open.choose(rng).unwrap();
        edges.push((j, i));
        deg[j] += 1;
        deg[i] += 1;
    }
    for _ in 0..rng.gen_range(0..=n / 3) {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || deg[u] >= 4 || deg[v] >= 4 || edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u)) {
            continue;
        }
        edges.push((u, v));
        deg[u] += 1;
        deg[v] += 1;
    }
    let mut heavy = Vec::with_capacity(n);
    let mut budget = Vec::with_capacity(n);
    for &d in &deg {
        let options: Vec<&(&str, u8, i8)> = KINDS.iter().filter(|k| (k.1 as i32 + k.2 as i32) as usize >= d).collect();
        let k = options.choose(rng).unwrap();
        heavy.push((ElementSpec::with_valence(k.0, k.1).unwrap(), k.2));
        budget.push(k.1 as i32 + k.2 as i32);
    }
    let mut used: Vec<i32> = deg.iter().map(|&d| d as i32).collect();
    let mut bonds = Vec::with_capacity(edges.len());
    for &(u, v) in &edges {
        let mut order = 1u8;
        while order < 3 && used[u] < budget[u] && used[v] < budget[v] && rng.gen_bool(0.2) {
            order += 1;
            used[u] += 1;
            used[v] += 1;
        }
        bonds.push((u, v, order));
    }
    with_implicit_hydrogens(&heavy, &bonds).expect("generator respects valences")
}

/// Cycle rank by Schmidt's chain decomposition: a DFS orients tree edges away from
/// the root and back edges towards it; each back edge opens one ear.
pub fn ear_count(n: usize, edges: &[(usize, usize)]) -> usize {
    if n == 0 {
        return 0;
    }
    let mut adj = vec![Vec::new(); n];
    for (i, &(u, v)) in edges.iter().enumerate() {
        adj[u].push((v, i));
        adj[v].push((u, i));
    }
    let mut order = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut tree_edge = vec![false; edges.len()];
    let mut seq = Vec::new();
    let mut stack = vec![(0usize, usize::MAX)];
    while let Some((v, via)) = stack.pop() {
        if order[v] != usize::MAX {
            continue;
        }
        order[v] = seq.len();
        seq.push(v);
        if via != usize::MAX {
            tree_edge[via] = true;
            let (a, b) = edges[via];
            parent[v] = if a == v { b } else { a };
        }
        for &(w, e) in adj[v].iter().rev() {
            if order[w] == usize::MAX {
                stack.push((w, e));
            }
        }
    }
    assert!(seq.len() == n, "oracle expects a connected graph");
    let mut visited = vec![false; n];
    let mut ears = 0;
    for &v in &seq {
        for &(w, e) in &adj[v] {
            // back edge from descendant w up to v
            if tree_edge[e] || order[w] < order[v] {
                continue;
            }
            ears += 1;
            visited[v] = true;
            let mut x = w;
            while !visited[x] {
                visited[x] = true;
                x = parent[x];
            }
        }
    }
    ears
}

/// Peeling height of every suppressed vertex from its branches (components of the
/// graph minus the vertex). A vertex on a cycle is infinite. Otherwise a branch that
/// is a tree contributes 1 + its height, a cyclic branch counts as infinite, and the
/// vertex height is the second largest contribution.
pub fn branch_heights(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    (0..n)
        .map(|v| {
            let mut comp = vec![usize::MAX; n];
            let mut values = Vec::new();
            for s in 0..n {
                if s == v || comp[s] != usize::MAX {
                    continue;
                }
                let id = values.len();
                let mut members = vec![s];
                comp[s] = id;
                let mut i = 0;
                while i < members.len() {
                    let x = members[i];
                    for &y in &adj[x] {
                        if y != v && comp[y] == usize::MAX {
                            comp[y] = id;
                            members.push(y);
                        }
                    }
                    i += 1;
                }
                let attach: Vec<usize> = adj[v].iter().copied().filter(|&y| comp[y] == id).collect();
                let inner = edges.iter().filter(|&&(a, b)| a != v && b != v && comp[a] == id).count();
                if attach.len() > 1 {
                    return usize::MAX;
                }
                if inner + 1 != members.len() {
                    values.push(usize::MAX);
                    continue;
                }
                // height of the branch rooted at its attachment vertex
                let mut dist = HashMap::new();
                dist.insert(attach[0], 0usize);
                let mut queue = vec![attach[0]];
                let mut k = 0;
                while k < queue.len() {
                    let x = queue[k];
                    for &y in &adj[x] {
                        if y != v && !dist.contains_key(&y) {
                            dist.insert(y, dist[&x] + 1);
                            queue.push(y);
                        }
                    }
                    k += 1;
                }
                values.push(1 + dist.values().max().unwrap());
            }
            values.sort_unstable_by(|a, b| b.cmp(a));
            values.get(1).copied().unwrap_or(0)
        })
        .collect()
}

/// Plain recursive tree used by the isomorphism oracle.
#[derive(Debug, Clone)]
pub struct OTree {
    pub label: String,
    pub children: Vec<(u8, OTree)>,
}

pub fn otree_from_fringe(t: &RootedFringeTree) -> OTree {
    fn build(nodes: &[FringeNode], i: usize) -> OTree {
        let n = &nodes[i];
        OTree {
            label: format!("{}/{}/{}", n.element.symbol(), n.element.valence(), n.ion_valence),
            children: n.children.iter().map(|&c| (nodes[c].order, build(nodes, c))).collect(),
        }
    }
    build(t.nodes(), 0)
}

/// Root-preserving isomorphism by trying every matching of children.
pub fn otree_iso(a: &OTree, b: &OTree) -> bool {
    if a.label != b.label || a.children.len() != b.children.len() {
        return false;
    }
    fn assign(a: &[(u8, OTree)], b: &[(u8, OTree)], used: &mut Vec<bool>, i: usize) -> bool {
        if i == a.len() {
            return true;
        }
        for j in 0..b.len() {
            if !used[j] && a[i].0 == b[j].0 && otree_iso(&a[i].1, &b[j].1) {
                used[j] = true;
                if assign(a, b, used, i + 1) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    assign(&a.children, &b.children, &mut vec![false; b.children.len()], 0)
}

/// Brute-force counter of every descriptor, keyed by column name. Independent of the
/// library except for graph access and the fringe catalog it matches against.
pub fn oracle_descriptors(g: &ChemicalGraph, space: &DescriptorSpace) -> HashMap<String, f64> {
    let mass: HashMap<&str, i64> =
        [("H", 10), ("C", 120), ("N", 140), ("O", 159), ("S", 320), ("Cl", 354), ("F", 189), ("P", 309), ("Br", 799)]
            .into_iter()
            .collect();
    let n_all = g.len();
    let heavy: Vec<usize> = (0..n_all).filter(|&a| g.atom(a).element.symbol() != "H").collect();
    let pos: HashMap<usize, usize> = heavy.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let mut edges = Vec::new();
    let mut orders = Vec::new();
    for b in g.bonds() {
        if let (Some(&u), Some(&v)) = (pos.get(&b.u), pos.get(&b.v)) {
            edges.push((u, v));
            orders.push(b.order);
        }
    }
    let n = heavy.len();
    let mut deg = vec![0usize; n];
    for &(u, v) in &edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    let heights = branch_heights(n, &edges);
    let interior: Vec<bool> = heights.iter().map(|&h| h >= space.rho).collect();
    let name = |a: usize| g.atom(a).element.to_string();
    let sym = |i: usize| (g.atom(heavy[i]).element.symbol().to_string(), g.atom(heavy[i]).element.valence(), deg[i]);
    let sym_str = |s: &(String, u8, usize)| {
        let e = ElementSpec::with_valence(&s.0, s.1).unwrap();
        format!("{}{}", e, s.2)
    };

    let mut out: HashMap<String, f64> = HashMap::new();
    let mut add = |k: String, x: f64| *out.entry(k).or_insert(0.0) += x;
    add("n_heavy".into(), n as f64);
    add("rank".into(), (edges.len() + 1 - n) as f64);
    add("n_int".into(), interior.iter().filter(|&&b| b).count() as f64);
    let total: i64 = (0..n_all).map(|a| mass[g.atom(a).element.symbol()]).sum();
    add("ms".into(), total as f64 / n_all as f64);
    for i in 0..n {
        if (1..=4).contains(&deg[i]) {
            add(format!("dg_{}", deg[i]), 1.0);
        }
    }
    let mut ideg = vec![0usize; n];
    for (k, &(u, v)) in edges.iter().enumerate() {
        if interior[u] && interior[v] {
            ideg[u] += 1;
            ideg[v] += 1;
            if orders[k] >= 2 {
                add(format!("bdint_{}", orders[k]), 1.0);
            }
            let (a, b) = (sym(u), sym(v));
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            add(format!("ec_{}_{}_{}", sym_str(&a), sym_str(&b), orders[k]), 1.0);
        }
        let leaf_u = deg[u] == 1;
        let leaf_v = deg[v] == 1;
        let cfg = |x: usize, y: usize| (sym(x).0, sym(x).1, sym(y).0, sym(y).1);
        let mut emit = |x: usize, y: usize| {
            add(format!("aclf_{}_{}_{}", name(heavy[x]), name(heavy[y]), orders[k]), 1.0);
        };
        match (leaf_u, leaf_v) {
            (true, true) => {
                if cfg(u, v) <= cfg(v, u) {
                    emit(u, v)
                } else {
                    emit(v, u)
                }
            }
            (true, false) => emit(u, v),
            (false, true) => emit(v, u),
            _ => {}
        }
    }
    for i in 0..n {
        if interior[i] {
            if (1..=4).contains(&ideg[i]) {
                add(format!("dgint_{}", ideg[i]), 1.0);
            }
            add(format!("naint_{}", name(heavy[i])), 1.0);
        }
    }
    for a in 0..n_all {
        let inside = pos.get(&a).map(|&i| interior[i]).unwrap_or(false);
        if !inside {
            add(format!("naex_{}", name(a)), 1.0);
        }
    }
    // fringe trees: grow from each interior atom without re-entering the interior
    let catalog: Vec<OTree> = (0..space.fringe_catalog.len()).map(|j| otree_from_fringe(&space.fringe_tree(j))).collect();
    for i in 0..n {
        if !interior[i] {
            continue;
        }
        fn grow(g: &ChemicalGraph, a: usize, from: Option<usize>, blocked: &dyn Fn(usize) -> bool) -> OTree {
            let at = g.atom(a);
            let mut children = Vec::new();
            for &(w, bi) in g.neighbors(a) {
                if Some(w) == from || blocked(w) {
                    continue;
                }
                children.push((g.bonds()[bi].order, grow(g, w, Some(a), blocked)));
            }
            OTree { label: format!("{}/{}/{}", at.element.symbol(), at.element.valence(), at.ion_valence), children }
        }
        let blocked = |w: usize| pos.get(&w).map(|&j| interior[j]).unwrap_or(false);
        let t = grow(g, heavy[i], None, &blocked);
        match catalog.iter().position(|c| otree_iso(c, &t)) {
            Some(j) => add(format!("fc_{}", space.fringe_catalog[j]), 1.0),
            None => add("fc_<unmatched>".into(), 1.0),
        }
    }
    out
}

/// Every rooted tree on 1..=max_n vertices with labels from `labels` and edge
/// multiplicities from `orders`, as parent arrays (parent[i] < i).
pub fn small_trees(max_n: usize, labels: &[&str], orders: &[u8]) -> Vec<RootedFringeTree> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let mut parents = vec![0usize; n];
        loop {
            let shapes = labels.len().pow(n as u32) * orders.len().pow(n as u32 - 1);
            for code in 0..shapes {
                let mut c = code;
                let mut nodes = Vec::with_capacity(n);
                for i in 0..n {
                    let l = labels[c % labels.len()];
                    c /= labels.len();
                    let (parent, order) = if i == 0 {
                        (None, 0)
                    } else {
                        let o = orders[c % orders.len()];
                        c /= orders.len();
                        (Some(parents[i]), o)
                    };
                    nodes.push(FringeNode {
                        element: ElementSpec::new(l).unwrap(),
                        ion_valence: 0,
                        parent,
                        order,
                        children: vec![],
                    });
                }
                out.push(RootedFringeTree::new(nodes).unwrap());
            }
            // next parent array in mixed radix: parent[i] in 0..i
            let mut i = n.saturating_sub(1);
            loop {
                if i == 0 {
                    break;
                }
                if parents[i] + 1 < i {
                    parents[i] += 1;
                    break;
                }
                parents[i] = 0;
                i -= 1;
            }
            if i == 0 {
                break;
            }
        }
    }
    out
}

/// Brute-force canonical form: the least relabelled (labels, edge set) over every
/// permutation of the non-root vertices.
pub fn brute_canonical(t: &RootedFringeTree) -> (Vec<String>, Vec<(usize, usize, u8)>) {
    let nodes = t.nodes();
    let n = nodes.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<(Vec<String>, Vec<(usize, usize, u8)>)> = None;
    loop {
        let mut labels = vec![String::new(); n];
        for i in 0..n {
            labels[perm[i]] = format!("{}/{}", nodes[i].element, nodes[i].ion_valence);
        }
        let mut edges: Vec<(usize, usize, u8)> =
            (1..n).map(|i| (perm[nodes[i].parent.unwrap()], perm[i], nodes[i].order)).collect();
        edges.sort();
        let cand = (labels, edges);
        if best.as_ref().map_or(true, |b| cand < *b) {
            best = Some(cand);
        }
        if !next_permutation(&mut perm[1..]) {
            break;
        }
    }
    best.unwrap()
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Number of mismatches between code equality and brute-force isomorphism over all
/// trees with at most `max_n` vertices on {C, O, H} with single and double bonds.
pub fn canonical_code_mismatches(max_n: usize) -> (usize, usize) {
    let trees = small_trees(max_n, &["C", "O", "H"], &[1, 2]);
    let mut by_code: BTreeMap<String, usize> = BTreeMap::new();
    let mut by_brute: BTreeMap<(Vec<String>, Vec<(usize, usize, u8)>), usize> = BTreeMap::new();
    let mut pairs: BTreeMap<(usize, usize), ()> = BTreeMap::new();
    for t in &trees {
        let nc = by_code.len();
        let c = *by_code.entry(t.canonical_code().to_string()).or_insert(nc);
        let nb = by_brute.len();
        let b = *by_brute.entry(brute_canonical(t)).or_insert(nb);
        pairs.insert((c, b), ());
    }
    // the two partitions agree iff the class pairing is a bijection
    let mismatches = pairs.len() - by_code.len() + pairs.len() - by_brute.len();
    (trees.len(), mismatches)
}
