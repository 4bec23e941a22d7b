//! Witness encoder: maps a graph satisfying a specification onto the decision variables
//! of the model. Aggregates are left to bound propagation, and the continuous part to
//! the exact re-solve, so a wrong row in any family shows up as a named conflict.

use std::collections::{BTreeMap, HashMap};

use chemlp::chemgraph::{decompose, ChemicalGraph};
use chemlp::descriptors::{ChemicalSymbol, DescriptorSpace, EdgeConfig};
use chemlp::milp::{check_solution, polish, propagate_bounds, MilpModel, ModelLayout, Slot, Solution, SolveStatus, Sym};
use chemlp::topospec::{find_embedding, EdgeClass, TopologicalSpecification};
use num_bigint::BigInt;
use num_rational::BigRational;

pub fn witness(g: &ChemicalGraph, spec: &TopologicalSpecification, space: &DescriptorSpace) -> BTreeMap<String, f64> {
    let dec = decompose(g, spec.rho()).unwrap();
    let emb = find_embedding(spec, g, &dec).unwrap();
    let lay = ModelLayout::new(spec, space);
    let rho = spec.rho();
    let mut f: BTreeMap<String, f64> = BTreeMap::new();
    let set = |f: &mut BTreeMap<String, f64>, n: String, v: f64| {
        f.insert(n, v);
    };
    let mut slot_of: HashMap<usize, Slot> = HashMap::new();
    for (i, &a) in emb.seed_atoms.iter().enumerate() {
        slot_of.insert(a, Slot::C(i + 1));
    }
    // path runs, highest colour in the lowest slots
    let mut runs_t: Vec<(usize, Vec<usize>)> = Vec::new();
    for k in (1..=lay.k_c).rev() {
        if let Some(p) = &emb.edge_paths[k - 1] {
            if p.len() > 2 {
                runs_t.push((k, p[1..p.len() - 1].to_vec()));
            }
        }
    }
    let mut slot = 0;
    let mut t_color = vec![0usize; lay.t_t + 2];
    let mut t_atom = vec![None; lay.t_t + 2];
    for (k, atoms) in &runs_t {
        for (j, &a) in atoms.iter().enumerate() {
            slot += 1;
            t_color[slot] = *k;
            t_atom[slot] = Some(a);
            slot_of.insert(a, Slot::T(slot));
            set(&mut f, format!("eT_{slot}"), if j > 0 { 1.0 } else { 0.0 });
        }
    }
    let leaf_len: HashMap<usize, usize> = emb.leaf_paths.iter().map(|(h, p)| (*h, p.len())).collect();
    let mut runs_f: Vec<(usize, Vec<usize>)> = emb
        .leaf_paths
        .iter()
        .map(|(h, p)| {
            let c = match slot_of[h] {
                Slot::C(i) => spec.leaf_color(i - 1).unwrap() + 1,
                Slot::T(i) => lay.tt_c + i,
                Slot::F(_) => unreachable!(),
            };
            (c, p.clone())
        })
        .collect();
    runs_f.sort_by(|a, b| b.0.cmp(&a.0));
    let mut slot = 0;
    let mut f_color = vec![0usize; lay.t_f + 2];
    for (c, atoms) in &runs_f {
        for (j, &a) in atoms.iter().enumerate() {
            slot += 1;
            f_color[slot] = *c;
            slot_of.insert(a, Slot::F(slot));
            set(&mut f, format!("eF_{slot}"), if j > 0 { 1.0 } else { 0.0 });
        }
    }
    let atom_of: HashMap<(u8, usize), usize> =
        slot_of.iter().map(|(&a, s)| ((s.letter().as_bytes()[0], s.index()), a)).collect();
    let atom = |s: Slot| atom_of.get(&(s.letter().as_bytes()[0], s.index())).copied();

    for k in 1..=lay.k_c {
        set(&mut f, format!("dclrT_{k}"), t_color.contains(&k) as u8 as f64);
    }
    for c in 1..=lay.c_f {
        set(&mut f, format!("dclrF_{c}"), f_color.contains(&c) as u8 as f64);
    }
    for k in 1..=lay.m_c {
        let on = spec.edges[k - 1].class != EdgeClass::AtLeastTwo
            && matches!(&emb.edge_paths[k - 1], Some(p) if p.len() == 2);
        set(&mut f, format!("eC_{k}"), on as u8 as f64);
    }
    for i in 1..=lay.t_t {
        let k = t_color[i];
        set(&mut f, format!("vT_{i}"), (t_atom[i].is_some()) as u8 as f64);
        for c in 0..=lay.k_c {
            set(&mut f, format!("chiT_{i}_{c}"), (c == k) as u8 as f64);
        }
        for kk in 1..=lay.k_c {
            let host = t_atom[i].map_or(false, |a| leaf_len.contains_key(&a));
            set(&mut f, format!("bl_{kk}_{i}"), (kk == k && host) as u8 as f64);
        }
    }
    for i in 1..=lay.t_t + 1 {
        f.entry(format!("eT_{i}")).or_insert(0.0);
    }
    for i in 1..=lay.t_f {
        set(&mut f, format!("vF_{i}"), (f_color[i] > 0) as u8 as f64);
        for c in 0..=lay.c_f {
            set(&mut f, format!("chiF_{i}_{c}"), (c == f_color[i]) as u8 as f64);
        }
    }
    for i in 1..=lay.t_f + 1 {
        f.entry(format!("eF_{i}")).or_insert(0.0);
    }

    let view = g.suppress_hydrogens();
    let heavy_index: HashMap<usize, usize> = view.heavy.iter().enumerate().map(|(v, &a)| (a, v)).collect();
    let sym = |a: usize| -> ChemicalSymbol {
        ChemicalSymbol { element: g.atom(a).element.clone(), degree: view.degree(heavy_index[&a]) as u8 }
    };
    let height_of = |a: usize| match leaf_len.get(&a) {
        Some(l) => l + rho,
        None => dec.fringe_trees[&a].height(),
    };
    for s in lay.slots() {
        let tag = s.tag();
        let a = atom(s);
        for &p in lay.fringe_of(s) {
            let on = a.map_or(false, |a| dec.fringe_trees[&a].canonical_code() == lay.tree(p).canonical_code());
            set(&mut f, format!("dfr{tag}_{p}"), on as u8 as f64);
        }
        let (d, dint) = match a {
            Some(a) => {
                let dint = g.neighbors(a).iter().filter(|(w, _)| dec.is_interior(*w)).count();
                (view.degree(heavy_index[&a]), dint)
            }
            None => (0, 0),
        };
        for x in 0..=4 {
            set(&mut f, format!("ddg{tag}_{x}"), (x == d) as u8 as f64);
            set(&mut f, format!("ddgint{tag}_{x}"), (x == dint) as u8 as f64);
        }
        for (ai, e) in lay.lambda_int.iter().enumerate() {
            set(&mut f, format!("dalpha{tag}_{}", ai + 1), a.map_or(false, |a| &g.atom(a).element == e) as u8 as f64);
        }
        for mu in 1..=lay.symbol_count() {
            let on = a.map_or(false, |a| lay.symbol_index(&sym(a)) == Some(mu));
            set(&mut f, format!("dcs{tag}_{mu}"), on as u8 as f64);
        }
    }
    // argmax-height vertex per path
    for k in 1..=lay.k_c {
        let best = (1..=lay.t_t).filter(|&i| t_color[i] == k).max_by_key(|&i| (height_of(t_atom[i].unwrap()), std::cmp::Reverse(i)));
        for i in 1..=lay.t_t {
            set(&mut f, format!("sigma_{k}_{i}"), (Some(i) == best) as u8 as f64);
        }
    }
    // path and leaf-path end symbols
    for e in &lay.edges {
        for end in [e.tail, e.head] {
            let (name_mu, a) = match end {
                Sym::FirstT(k) => (end, (1..=lay.t_t).find(|&i| t_color[i] == k).and_then(|i| t_atom[i])),
                Sym::LastT(k) => (end, (1..=lay.t_t).rev().find(|&i| t_color[i] == k).and_then(|i| t_atom[i])),
                Sym::FirstF(c) => (end, (1..=lay.t_f).find(|&i| f_color[i] == c).and_then(|i| atom(Slot::F(i)))),
                Sym::Slot(_) => continue,
            };
            for mu in 1..=lay.symbol_count() {
                let on = a.map_or(false, |a| lay.symbol_index(&sym(a)) == Some(mu));
                set(&mut f, name_mu.var(mu), on as u8 as f64);
            }
        }
    }
    // multiplicities and edge configurations
    let end_atom = |s: Sym| -> Option<usize> {
        match s {
            Sym::Slot(x) => atom(x),
            Sym::FirstT(k) => (1..=lay.t_t).find(|&i| t_color[i] == k).and_then(|i| t_atom[i]),
            Sym::LastT(k) => (1..=lay.t_t).rev().find(|&i| t_color[i] == k).and_then(|i| t_atom[i]),
            Sym::FirstF(c) => (1..=lay.t_f).find(|&i| f_color[i] == c).and_then(|i| atom(Slot::F(i))),
        }
    };
    for e in &lay.edges {
        let bond = match (end_atom(e.tail), end_atom(e.head)) {
            (Some(u), Some(v)) => g.neighbors(u).iter().find(|(w, _)| *w == v).map(|&(_, bi)| g.bonds()[bi].order),
            _ => None,
        };
        let used = f[&e.used];
        let o = if used > 0.5 { bond.expect("realised edge is a bond") } else { 0 };
        for x in 0..=3 {
            set(&mut f, format!("{}_{x}", e.beta), (x == o) as u8 as f64);
        }
        let cfg = (o > 0).then(|| EdgeConfig::new(sym(end_atom(e.tail).unwrap()), sym(end_atom(e.head).unwrap()), o));
        for (gi, c) in lay.configs.iter().enumerate() {
            let (Some(a), Some(b)) = (lay.symbol_index(&c.mu), lay.symbol_index(&c.mu_prime)) else { continue };
            let sides: Vec<(usize, usize)> = if a == b { vec![(a, b)] } else { vec![(a, b), (b, a)] };
            for (oi, &(tl, _)) in sides.iter().enumerate() {
                let on = cfg.as_ref() == Some(c) && lay.symbol_index(&sym(end_atom(e.tail).unwrap())) == Some(tl);
                set(&mut f, format!("dec_{}_{}_{oi}", e.tag, gi + 1), on as u8 as f64);
            }
        }
    }
    for k in 1..=lay.k_c {
        for i in 2..=lay.t_t {
            for o in [2u8, 3] {
                let on = t_color[i] == k && f[&format!("dbetaT_{i}_{o}")] > 0.5;
                set(&mut f, format!("bdT_{k}_{i}_{o}"), on as u8 as f64);
            }
        }
    }
    set(&mut f, format!("datm_{}", g.len()), 1.0);
    f
}

/// Fixes the witness, propagates, re-solves the continuous part and checks every row.
/// Returns the first failing row on error.
pub fn check_witness(m: &MilpModel, w: &BTreeMap<String, f64>) -> Result<Solution, String> {
    let mut lb: Vec<f64> = m.vars.iter().map(|v| v.lb).collect();
    let mut ub: Vec<f64> = m.vars.iter().map(|v| v.ub).collect();
    for (n, &x) in w {
        if n.starts_with("datm_") && m.var(n).is_none() {
            return Err(format!("atom count {n} outside the model range"));
        }
        let Some(j) = m.var(n) else { continue };
        if x < lb[j] - 1e-9 || x > ub[j] + 1e-9 {
            return Err(format!("witness {n} = {x} outside [{}, {}]", lb[j], ub[j]));
        }
        lb[j] = x;
        ub[j] = x;
    }
    for (j, v) in m.vars.iter().enumerate() {
        if v.name.starts_with("datm_") && !w.contains_key(&v.name) {
            ub[j] = 0.0;
        }
    }
    propagate_bounds(m, &mut lb, &mut ub).map_err(|r| format!("conflict at row {r}"))?;
    let mut sol = Solution::empty(SolveStatus::Feasible);
    for (j, v) in m.vars.iter().enumerate() {
        if v.kind.is_integral() {
            if lb[j] != ub[j] {
                return Err(format!("{} not determined: [{}, {}]", v.name, lb[j], ub[j]));
            }
            sol.values.insert(v.name.clone(), BigRational::from_integer(BigInt::from(lb[j] as i64)));
        }
    }
    let sol = polish(m, &sol).map_err(|e| e.to_string())?;
    check_solution(m, &sol).map_err(|e| e.to_string())?;
    Ok(sol)
}
