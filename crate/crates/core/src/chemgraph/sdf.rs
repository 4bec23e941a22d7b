//! V2000 molfile / SDF reading and writing.
//!
//! Implicit hydrogens are materialised on read: each heavy atom receives the
//! smallest valence of its element that covers its explicit bonds (or the valence
//! implied by the `vvv` column when present), and hydrogens fill the remainder.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Atom, Bond, ChemicalGraph, ElementSpec, GraphError};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("record {index} ({name}): {error}")]
pub struct SdfRecordError {
    /// Zero-based position of the record in the file.
    pub index: usize,
    pub name: String,
    pub error: GraphError,
}

/// One entry per record, in file order.
pub fn parse_sdf(text: &str) -> Vec<Result<ChemicalGraph, SdfRecordError>> {
    parse_sdf_named(text).into_iter().map(|(_, r)| r).collect()
}

/// Like [`parse_sdf`], paired with each record's title line.
pub fn parse_sdf_named(text: &str) -> Vec<(String, Result<ChemicalGraph, SdfRecordError>)> {
    let mut out = Vec::new();
    let mut block: Vec<&str> = Vec::new();
    let flush = |block: &mut Vec<&str>, out: &mut Vec<(String, Result<ChemicalGraph, SdfRecordError>)>| {
        if block.iter().all(|l| l.trim().is_empty()) {
            block.clear();
            return;
        }
        let index = out.len();
        let name = block.first().map(|l| l.trim().to_string()).unwrap_or_default();
        let res = parse_molfile(block).map_err(|error| SdfRecordError { index, name: name.clone(), error });
        out.push((name, res));
        block.clear();
    };
    for line in text.lines() {
        if line.trim_end() == "$$$$" {
            flush(&mut block, &mut out);
        } else {
            block.push(line.trim_end_matches('\r'));
        }
    }
    flush(&mut block, &mut out);
    out
}

fn field(line: &str, from: usize, to: usize) -> &str {
    let end = to.min(line.len());
    if from >= end {
        ""
    } else {
        line.get(from..end).unwrap_or("").trim()
    }
}

fn int_field(line: &str, from: usize, to: usize) -> Result<i32, GraphError> {
    let f = field(line, from, to);
    if f.is_empty() {
        return Ok(0);
    }
    f.parse().map_err(|_| GraphError::Molfile(format!("bad integer {f:?} in {line:?}")))
}

fn charge_from_code(code: i32) -> Result<i8, GraphError> {
    Ok(match code {
        0 | 4 => 0,
        1 => 3,
        2 => 2,
        3 => 1,
        5 => -1,
        6 => -2,
        7 => -3,
        c => return Err(GraphError::Molfile(format!("bad charge code {c}"))),
    })
}

struct RawAtom {
    symbol: String,
    charge: i8,
    vvv: i32,
}

/// Parses a single molfile (header, counts line, atom and bond blocks, properties).
pub fn parse_molfile(lines: &[&str]) -> Result<ChemicalGraph, GraphError> {
    if lines.len() < 4 {
        return Err(GraphError::Molfile("record shorter than header and counts line".into()));
    }
    let counts = lines[3];
    if counts.contains("V3000") {
        return Err(GraphError::Molfile("V3000 records are not supported".into()));
    }
    let (na, nb) = match (field(counts, 0, 3).parse::<usize>(), field(counts, 3, 6).parse::<usize>()) {
        (Ok(a), Ok(b)) => (a, b),
        _ => {
            let mut it = counts.split_whitespace();
            match (it.next().and_then(|s| s.parse().ok()), it.next().and_then(|s| s.parse().ok())) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(GraphError::Molfile(format!("malformed counts line {counts:?}"))),
            }
        }
    };
    if lines.len() < 4 + na + nb {
        return Err(GraphError::Molfile(format!("counts line announces {na} atoms and {nb} bonds but the record is shorter")));
    }
    let mut raw = Vec::with_capacity(na);
    for line in &lines[4..4 + na] {
        let (symbol, charge_code, vvv) = if line.len() >= 34 {
            (field(line, 31, 34).to_string(), int_field(line, 36, 39)?, int_field(line, 48, 51)?)
        } else {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let sym = parts.get(3).ok_or_else(|| GraphError::Molfile(format!("bad atom line {line:?}")))?;
            (sym.to_string(), 0, 0)
        };
        raw.push(RawAtom { symbol, charge: charge_from_code(charge_code)?, vvv });
    }
    let mut bonds = Vec::with_capacity(nb);
    for line in &lines[4 + na..4 + na + nb] {
        let (a, b, t) = if line.len() >= 9 {
            (int_field(line, 0, 3)?, int_field(line, 3, 6)?, int_field(line, 6, 9)?)
        } else {
            let p: Vec<i32> = line.split_whitespace().take(3).filter_map(|s| s.parse().ok()).collect();
            if p.len() < 3 {
                return Err(GraphError::Molfile(format!("bad bond line {line:?}")));
            }
            (p[0], p[1], p[2])
        };
        if a < 1 || b < 1 || a as usize > na || b as usize > na {
            return Err(GraphError::Molfile(format!("bond {a}-{b} references a missing atom")));
        }
        if !(1..=3).contains(&t) {
            return Err(GraphError::Molfile(format!("bond type {t} is not a single, double or triple bond")));
        }
        bonds.push(Bond { u: a as usize - 1, v: b as usize - 1, order: t as u8 });
    }
    let mut chg_seen = false;
    for line in &lines[4 + na + nb..] {
        if line.starts_with("M  END") {
            break;
        }
        if line.starts_with("M  CHG") {
            if !chg_seen {
                for r in raw.iter_mut() {
                    r.charge = 0;
                }
                chg_seen = true;
            }
            let nums: Vec<i32> = line[6..].split_whitespace().filter_map(|s| s.parse().ok()).collect();
            for pair in nums.get(1..).unwrap_or(&[]).chunks(2) {
                if let [idx, q] = pair {
                    let i = (*idx as usize).checked_sub(1).filter(|&i| i < na);
                    let i = i.ok_or_else(|| GraphError::Molfile(format!("M  CHG references atom {idx}")))?;
                    raw[i].charge = i8::try_from(*q).map_err(|_| GraphError::Molfile(format!("charge {q}")))?;
                }
            }
        }
    }

    let mut used = vec![0i32; na];
    for b in &bonds {
        used[b.u] += b.order as i32;
        used[b.v] += b.order as i32;
    }
    let mut atoms = Vec::with_capacity(na);
    let mut implicit = Vec::with_capacity(na);
    for (i, r) in raw.iter().enumerate() {
        let candidates = ElementSpec::ingest_valences(&r.symbol).ok_or_else(|| GraphError::UnknownElement(r.symbol.clone()))?;
        let ion = ElementSpec::ion_valence_for_charge(&r.symbol, r.charge);
        let valence = match r.vvv {
            0 => candidates.iter().copied().find(|&v| v as i32 + ion as i32 >= used[i]),
            15 => None,
            total => u8::try_from(total - ion as i32).ok(),
        };
        let element = match valence {
            Some(v) => ElementSpec::with_valence(&r.symbol, v)?,
            None => {
                let e = ElementSpec::new(&r.symbol)?;
                return Err(GraphError::Valence {
                    vertex: i,
                    element: e.to_string(),
                    expected: e.valence() as i32 + ion as i32,
                    found: used[i],
                });
            }
        };
        let missing = element.valence() as i32 + ion as i32 - used[i];
        if missing < 0 {
            return Err(GraphError::Valence {
                vertex: i,
                element: element.to_string(),
                expected: element.valence() as i32 + ion as i32,
                found: used[i],
            });
        }
        implicit.push(if element.is_hydrogen() { 0 } else { missing as usize });
        atoms.push(Atom::with_ion(element, ion));
    }
    for (i, &k) in implicit.iter().enumerate() {
        for _ in 0..k {
            let h = atoms.len();
            atoms.push(Atom::new(ElementSpec::hydrogen()));
            bonds.push(Bond { u: i, v: h, order: 1 });
        }
    }
    ChemicalGraph::new(atoms, bonds)
}

/// Writes graphs as an SDF with every hydrogen explicit.
pub fn write_sdf(records: &[(&str, &ChemicalGraph)]) -> String {
    let mut s = String::new();
    for (name, g) in records {
        let _ = writeln!(s, "{name}");
        let _ = writeln!(s, "  chemlp");
        let _ = writeln!(s);
        let _ = writeln!(s, "{:>3}{:>3}  0  0  0  0  0  0  0  0999 V2000", g.len(), g.bonds().len());
        let mut used = vec![0i32; g.len()];
        for b in g.bonds() {
            used[b.u] += b.order as i32;
            used[b.v] += b.order as i32;
        }
        for (i, a) in g.atoms().iter().enumerate() {
            let vvv = if a.element.is_default_valence() { 0 } else { used[i] };
            let _ = writeln!(
                s,
                "{:>10.4}{:>10.4}{:>10.4} {:<3} 0  0  0  0  0{:>3}  0  0  0  0  0  0",
                0.0,
                0.0,
                0.0,
                a.element.symbol(),
                vvv
            );
        }
        for b in g.bonds() {
            let _ = writeln!(s, "{:>3}{:>3}{:>3}  0", b.u + 1, b.v + 1, b.order);
        }
        let charged: Vec<(usize, i8)> = g
            .atoms()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.ion_valence != 0)
            .map(|(i, a)| (i, a.element.charge_for_ion_valence(a.ion_valence)))
            .collect();
        for chunk in charged.chunks(8) {
            let _ = write!(s, "M  CHG{:>3}", chunk.len());
            for (i, q) in chunk {
                let _ = write!(s, " {:>3} {:>3}", i + 1, q);
            }
            let _ = writeln!(s);
        }
        let _ = writeln!(s, "M  END");
        let _ = writeln!(s, "$$$$");
    }
    s
}
