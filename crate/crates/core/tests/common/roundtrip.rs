//! Round-trip instances: a specification derived from a target graph, a dataset that
//! contains the target, and a predictor trained on it.

use std::collections::{BTreeMap, BTreeSet};

use chemlp::chemgraph::{decompose, with_implicit_hydrogens, ChemicalGraph, ElementSpec};
use chemlp::descriptors::{build_space, featurize, DescriptorSpace};
use chemlp::regression::{LassoOptions, LinearPredictor};
use chemlp::topospec::{Bounds, SeedEdge, SeedGraph, SeedVertex, SpecDocument, TopologicalSpecification};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Default)]
pub struct Derive {
    /// Chains ending in an interior leaf become leaf paths of their seed vertex.
    pub leaf_paths: bool,
    /// Path edges get length `[1, L + 1]` and single edges `[1, 2]` instead of exact lengths.
    pub widen: bool,
    /// Extra fringe trees allowed everywhere.
    pub extra_fringe: Vec<String>,
    /// Slack added to the interior and heavy-atom upper bounds.
    pub slack: usize,
}

pub fn carbon_frame(n: usize, bonds: &[(usize, usize, u8)], hetero: &[(usize, &str)]) -> ChemicalGraph {
    let mut heavy: Vec<(ElementSpec, i8)> = (0..n).map(|_| (ElementSpec::new("C").unwrap(), 0)).collect();
    for &(i, s) in hetero {
        heavy[i].0 = ElementSpec::new(s).unwrap();
    }
    with_implicit_hydrogens(&heavy, bonds).unwrap()
}

/// A specification satisfied by `g`, whose seed graph is the interior with chains of
/// interior-degree-2 atoms contracted.
pub fn spec_from_graph(g: &ChemicalGraph, rho: usize, opt: &Derive) -> SpecDocument {
    let dec = decompose(g, rho).unwrap();
    let interior = &dec.interior;
    let mut adj: BTreeMap<usize, Vec<usize>> = interior.iter().map(|&a| (a, Vec::new())).collect();
    let mut order_of = BTreeMap::new();
    for &bi in &dec.interior_edges {
        let b = g.bonds()[bi];
        adj.get_mut(&b.u).unwrap().push(b.v);
        adj.get_mut(&b.v).unwrap().push(b.u);
        order_of.insert((b.u.min(b.v), b.u.max(b.v)), b.order);
    }
    let mut seeds: BTreeSet<usize> = interior.iter().copied().filter(|a| adj[a].len() != 2).collect();
    if seeds.is_empty() {
        seeds.insert(interior[0]);
    }
    // contract chains, promoting chain midpoints until no loops or parallel chains remain
    let chains = loop {
        let mut chains: Vec<Vec<usize>> = Vec::new();
        let mut used = BTreeSet::new();
        for &s in &seeds {
            for &n in &adj[&s] {
                if used.contains(&(s.min(n), s.max(n))) {
                    continue;
                }
                let mut path = vec![s, n];
                used.insert((s.min(n), s.max(n)));
                while !seeds.contains(path.last().unwrap()) {
                    let cur = *path.last().unwrap();
                    let prev = path[path.len() - 2];
                    let next = *adj[&cur].iter().find(|&&w| w != prev).unwrap();
                    used.insert((cur.min(next), cur.max(next)));
                    path.push(next);
                }
                chains.push(path);
            }
        }
        let mut pairs = BTreeSet::new();
        let bad = chains.iter().find(|c| {
            let (a, b) = (c[0], *c.last().unwrap());
            a == b || !pairs.insert((a.min(b), a.max(b)))
        });
        match bad {
            Some(c) => {
                seeds.insert(c[c.len() / 2]);
            }
            None => break chains,
        }
    };

    // chains into interior leaves may become leaf paths
    let mut leaf_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut dropped = BTreeSet::new();
    let mut kept = Vec::new();
    for c in chains {
        let (a, b) = (c[0], *c.last().unwrap());
        let (host, tip) = if adj[&b].len() == 1 { (a, b) } else if adj[&a].len() == 1 { (b, a) } else { (a, a) };
        if opt.leaf_paths && host != tip && adj[&host].len() >= 2 && !leaf_of.contains_key(&host) && !dropped.contains(&host)
        {
            leaf_of.insert(host, c.len() - 1);
            dropped.insert(tip);
        } else {
            kept.push(c);
        }
    }
    let seed_list: Vec<usize> = seeds.iter().copied().filter(|s| !dropped.contains(s)).collect();
    let pos = |a: usize| seed_list.iter().position(|&s| s == a).unwrap();
    let code = |a: usize| dec.fringe_trees[&a].canonical_code().to_string();

    let mut fringe_edge: BTreeSet<String> = opt.extra_fringe.iter().cloned().collect();
    for &a in interior {
        if !seed_list.contains(&a) {
            fringe_edge.insert(code(a));
        }
    }
    let mut edges = Vec::new();
    for c in &kept {
        let l = c.len() - 1;
        let length = match (l, opt.widen) {
            (1, false) => Bounds(1, 1),
            (1, true) => Bounds(1, 2),
            (l, false) => Bounds(l, l),
            (l, true) => Bounds(1, l + 1),
        };
        edges.push(SeedEdge {
            u: pos(c[0]),
            v: pos(*c.last().unwrap()),
            length,
            leaf_branches: None,
            height: None,
            double: None,
            triple: None,
        });
    }
    let vertices = seed_list
        .iter()
        .map(|&a| {
            let mut fringe: BTreeSet<String> = opt.extra_fringe.iter().cloned().collect();
            fringe.insert(code(a));
            SeedVertex {
                elements: vec![g.atom(a).element.clone()],
                fringe: fringe.into_iter().collect(),
                leaf_path: leaf_of.get(&a).map(|_| Bounds(0, 1)),
                height: None,
            }
        })
        .collect();

    let mut lambda_int = BTreeSet::new();
    let mut lambda_ex = BTreeSet::new();
    for &a in interior {
        lambda_int.insert(g.atom(a).element.clone());
    }
    for (i, at) in g.atoms().iter().enumerate() {
        if !dec.is_interior(i) {
            lambda_ex.insert(at.element.clone());
        }
    }
    for c in &opt.extra_fringe {
        let t = chemlp::chemgraph::RootedFringeTree::from_code(c).unwrap();
        lambda_int.insert(t.root_element().clone());
        for e in t.non_root_element_counts().keys() {
            lambda_ex.insert(e.clone());
        }
    }
    let n_heavy = g.atoms().iter().filter(|a| !a.element.is_hydrogen()).count();
    let nint = interior.len();
    SpecDocument {
        version: 1,
        rho,
        n_lb: nint.max(2),
        n_star: n_heavy + 2 * opt.slack,
        nint: Bounds(nint, nint + opt.slack),
        t_t: None,
        t_f: None,
        seed: SeedGraph { vertices, edges },
        lambda_int: lambda_int.into_iter().collect(),
        lambda_ex: lambda_ex.into_iter().collect(),
        na: BTreeMap::new(),
        na_int: BTreeMap::new(),
        fringe_edge: fringe_edge.into_iter().collect(),
        fc: BTreeMap::new(),
        ac_lf: Vec::new(),
        dg: None,
        dg_int: None,
        mass_ub: None,
    }
}

pub struct Instance {
    pub name: &'static str,
    pub target: ChemicalGraph,
    pub spec: TopologicalSpecification,
}

/// Target graphs used by the round-trip suite, smallest first.
pub fn targets() -> Vec<(&'static str, ChemicalGraph, Derive)> {
    let plain = Derive::default();
    vec![
        // cyclobutanol
        ("cyclobutanol", carbon_frame(5, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1), (0, 4, 1)], &[(4, "O")]), plain.clone()),
        // methylcyclopentane
        (
            "methylcyclopentane",
            carbon_frame(6, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 0, 1), (0, 5, 1)], &[]),
            plain.clone(),
        ),
        // 2-(cyclohexenyl)ethanol: ring with a double bond and a two-carbon arm
        (
            "cyclohexenylethanol",
            carbon_frame(
                9,
                &[(0, 1, 2), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (5, 0, 1), (0, 6, 1), (6, 7, 1), (7, 8, 1)],
                &[(8, "O")],
            ),
            Derive { leaf_paths: true, ..Derive::default() },
        ),
        // bicyclic amine with a nitrile arm
        (
            "azabicyclic_nitrile",
            carbon_frame(
                11,
                &[
                    (0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 0, 1), (2, 5, 1), (5, 6, 1), (6, 0, 1),
                    (3, 7, 1), (7, 8, 1), (8, 9, 1), (9, 10, 3),
                ],
                &[(5, "N"), (10, "N")],
            ),
            Derive { widen: true, ..Derive::default() },
        ),
        // substituted pyridine-like ring with an ether bridge
        (
            "pyridyl_ether",
            carbon_frame(
                14,
                &[
                    (0, 1, 2), (1, 2, 1), (2, 3, 2), (3, 4, 1), (4, 5, 2), (5, 0, 1), (3, 6, 1), (6, 7, 1),
                    (7, 8, 1), (8, 9, 1), (9, 10, 1), (10, 11, 1), (11, 7, 1), (9, 12, 1), (12, 13, 1),
                ],
                &[(1, "N"), (6, "O"), (13, "O")],
            ),
            Derive { widen: true, slack: 1, ..Derive::default() },
        ),
    ]
}

pub fn instances() -> Vec<Instance> {
    targets()
        .into_iter()
        .map(|(name, target, d)| {
            let spec = TopologicalSpecification::new(spec_from_graph(&target, 2, &d)).unwrap();
            Instance { name, target, spec }
        })
        .collect()
}

/// Targets plus seeded random graphs with a nonempty interior.
pub fn dataset() -> Vec<ChemicalGraph> {
    let mut out: Vec<ChemicalGraph> = targets().into_iter().map(|t| t.1).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    while out.len() < 40 {
        let g = super::random_graph(&mut rng, 12);
        if decompose(&g, 2).map(|d| d.interior.len() >= 2).unwrap_or(false) {
            out.push(g);
        }
    }
    out
}

/// A synthetic property: heavy-atom count, mass and a ring term, on which a predictor
/// is trained over `dataset()`.
pub fn property(g: &ChemicalGraph) -> f64 {
    let heavy = g.atoms().iter().filter(|a| !a.element.is_hydrogen()).count() as f64;
    0.8 * heavy + 0.01 * g.total_mass_star() as f64 - 1.5 * g.rank().unwrap() as f64
}

pub fn trained() -> (Vec<ChemicalGraph>, DescriptorSpace, LinearPredictor) {
    let data = dataset();
    let space = build_space(&data, 2).unwrap();
    let rows: Vec<Vec<f64>> = data.iter().map(|g| featurize(g, &space).unwrap().to_f64()).collect();
    let y: Vec<f64> = data.iter().map(property).collect();
    let (p, _) = LinearPredictor::train(&rows, &y, 1e-3, space.names(), space.hash(), &LassoOptions::default()).unwrap();
    (data, space, p)
}
