use std::collections::HashMap;

use super::build::{ModelLayout, Slot};
use super::{MilpError, Solution};
use crate::chemgraph::{Atom, Bond, ChemicalGraph};
use crate::descriptors::DescriptorSpace;
use crate::topospec::TopologicalSpecification;

fn one_of(sol: &Solution, names: impl Iterator<Item = (usize, String)>, what: &str) -> Result<usize, MilpError> {
    let on: Vec<usize> = names.filter(|(_, n)| sol.is_on(n)).map(|(i, _)| i).collect();
    match on.as_slice() {
        [x] => Ok(*x),
        _ => Err(MilpError::Decode(format!("{what}: expected exactly one choice, found {}", on.len()))),
    }
}

fn order(sol: &Solution, name: &str) -> Result<u8, MilpError> {
    match sol.get_int(name) {
        o @ 1..=3 => Ok(o as u8),
        o => Err(MilpError::Decode(format!("{name} = {o} is not a bond multiplicity"))),
    }
}

/// Colour run `c` of the `x` slots (`T` or `F`), checked to be consecutive.
fn run(sol: &Solution, x: &str, t: usize, c: usize) -> Result<Vec<usize>, MilpError> {
    let r: Vec<usize> = (1..=t).filter(|i| sol.is_on(&format!("chi{x}_{i}_{c}"))).collect();
    for w in r.windows(2) {
        if w[1] != w[0] + 1 || !sol.is_on(&format!("e{x}_{}", w[1])) {
            return Err(MilpError::Decode(format!("colour {c} of the {x} slots is not one run")));
        }
    }
    if r.is_empty() {
        return Err(MilpError::Decode(format!("colour {c} of the {x} slots is used but empty")));
    }
    Ok(r)
}

/// Rebuilds the chemical graph encoded by a solution of the model.
pub fn decode(sol: &Solution, spec: &TopologicalSpecification, space: &DescriptorSpace) -> Result<ChemicalGraph, MilpError> {
    if !sol.status.has_solution() {
        return Err(MilpError::Decode(format!("nothing to decode from a {} result", sol.status.as_str())));
    }
    let lay = ModelLayout::new(spec, space);
    let mut atoms = Vec::new();
    let mut bonds = Vec::new();
    let mut at: HashMap<(u8, usize), usize> = HashMap::new();
    let key = |s: Slot| (s.letter().as_bytes()[0], s.index());
    let mut fringes = Vec::new();
    for s in lay.slots() {
        if let Some(o) = lay.occupied(s) {
            if !sol.is_on(&o) {
                continue;
            }
        }
        let tag = s.tag();
        let a = one_of(sol, (1..=lay.lambda_int.len()).map(|a| (a, format!("dalpha{tag}_{a}"))), &format!("element of {tag}"))?;
        let p = one_of(sol, lay.fringe_of(s).iter().map(|&p| (p, format!("dfr{tag}_{p}"))), &format!("fringe tree of {tag}"))?;
        let tree = lay.tree(p);
        if tree.root_element() != &lay.lambda_int[a - 1] {
            return Err(MilpError::Decode(format!("{tag}: fringe root disagrees with the element")));
        }
        at.insert(key(s), atoms.len());
        fringes.push((atoms.len(), p));
        atoms.push(Atom::with_ion(lay.lambda_int[a - 1].clone(), tree.root_ion_valence()));
    }
    let atom = |s: Slot| at.get(&key(s)).copied().ok_or_else(|| MilpError::Decode(format!("{} is referenced but unused", s.tag())));
    for k in lay.k_tilde + 1..=lay.m_c {
        if sol.is_on(&format!("eC_{k}")) {
            let e = &spec.edges[k - 1];
            bonds.push(Bond { u: atom(Slot::C(e.tail + 1))?, v: atom(Slot::C(e.head + 1))?, order: order(sol, &format!("betaC_{k}"))? });
        }
    }
    for k in 1..=lay.k_c {
        if !sol.is_on(&format!("dclrT_{k}")) {
            continue;
        }
        let e = &spec.edges[k - 1];
        let r = run(sol, "T", lay.t_t, k)?;
        let (first, last) = (r[0], *r.last().unwrap());
        bonds.push(Bond { u: atom(Slot::C(e.tail + 1))?, v: atom(Slot::T(first))?, order: order(sol, &format!("betaCTk_{k}"))? });
        for &i in &r[1..] {
            bonds.push(Bond { u: atom(Slot::T(i - 1))?, v: atom(Slot::T(i))?, order: order(sol, &format!("betaT_{i}"))? });
        }
        bonds.push(Bond { u: atom(Slot::T(last))?, v: atom(Slot::C(e.head + 1))?, order: order(sol, &format!("betaTCk_{k}"))? });
    }
    for c in 1..=lay.c_f {
        if !sol.is_on(&format!("dclrF_{c}")) {
            continue;
        }
        let root = if c <= lay.tt_c { Slot::C(spec.leaf_vertices[c - 1] + 1) } else { Slot::T(c - lay.tt_c) };
        let r = run(sol, "F", lay.t_f, c)?;
        bonds.push(Bond { u: atom(root)?, v: atom(Slot::F(r[0]))?, order: order(sol, &format!("betasF_{c}"))? });
        for &i in &r[1..] {
            bonds.push(Bond { u: atom(Slot::F(i - 1))?, v: atom(Slot::F(i))?, order: order(sol, &format!("betaF_{i}"))? });
        }
    }
    for (root, p) in fringes {
        let nodes = lay.tree(p).nodes();
        let mut idx = vec![root; nodes.len()];
        for (j, n) in nodes.iter().enumerate().skip(1) {
            idx[j] = atoms.len();
            atoms.push(Atom::with_ion(n.element.clone(), n.ion_valence));
            bonds.push(Bond { u: idx[n.parent.expect("non-root node has a parent")], v: idx[j], order: n.order });
        }
    }
    ChemicalGraph::new(atoms, bonds).map_err(|e| MilpError::Decode(format!("decoded graph is invalid: {e}")))
}
