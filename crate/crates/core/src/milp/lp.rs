//! CPLEX LP text: a writer for [`MilpModel`] and a reader for the same subset.
//!
//! Every variable gets an explicit line in `Bounds`, in model order, which is how
//! the reader recovers the variable order. Metadata travels as `\ meta key value`
//! comment lines ahead of the objective.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use super::{MilpError, MilpModel, ObjSense, Row, Sense, VarKind};

const WRAP: usize = 8;

pub(crate) fn num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

fn terms(out: &mut String, m: &MilpModel, coeffs: &[(usize, f64)]) {
    for (t, &(j, a)) in coeffs.iter().enumerate() {
        if t > 0 && t % WRAP == 0 {
            out.push_str("\n  ");
        }
        let name = &m.vars[j].name;
        if t == 0 {
            let _ = write!(out, " {} {name}", num(a));
        } else if a < 0.0 {
            let _ = write!(out, " - {} {name}", num(-a));
        } else {
            let _ = write!(out, " + {} {name}", num(a));
        }
    }
}

fn name_list(out: &mut String, names: &[&str]) {
    for chunk in names.chunks(WRAP) {
        out.push(' ');
        out.push_str(&chunk.join(" "));
        out.push('\n');
    }
}

/// Writes the model as CPLEX LP text. Output depends only on the model.
pub fn emit_lp(m: &MilpModel) -> Result<String, MilpError> {
    if m.vars.is_empty() {
        return Err(MilpError::Lp { line: 0, msg: "model has no variables".into() });
    }
    for v in &m.vars {
        if v.kind.is_integral() && !(v.lb.is_finite() && v.ub.is_finite()) {
            return Err(MilpError::Bounds(v.name.clone()));
        }
    }
    let mut out = String::new();
    out.push_str("\\ chemlp model\n");
    for (k, v) in &m.metadata {
        let _ = writeln!(out, "\\ meta {k} {v}");
    }
    out.push_str(match m.objective.sense {
        ObjSense::Minimize => "Minimize\n",
        ObjSense::Maximize => "Maximize\n",
    });
    out.push_str(" obj:");
    if m.objective.coeffs.is_empty() {
        terms(&mut out, m, &[(0, 0.0)]);
    } else {
        terms(&mut out, m, &m.objective.coeffs);
    }
    out.push_str("\nSubject To\n");
    for r in &m.rows {
        let _ = write!(out, " {}:", r.name);
        terms(&mut out, m, &r.coeffs);
        let _ = writeln!(out, " {} {}", r.sense.symbol(), num(r.rhs));
    }
    out.push_str("Bounds\n");
    for v in &m.vars {
        if v.lb == f64::NEG_INFINITY && v.ub == f64::INFINITY {
            let _ = writeln!(out, " {} free", v.name);
        } else if v.lb == v.ub {
            let _ = writeln!(out, " {} = {}", v.name, num(v.lb));
        } else {
            let _ = writeln!(out, " {} <= {} <= {}", num(v.lb), v.name, num(v.ub));
        }
    }
    let generals: Vec<&str> = m.vars.iter().filter(|v| v.kind == VarKind::Integer).map(|v| v.name.as_str()).collect();
    if !generals.is_empty() {
        out.push_str("Generals\n");
        name_list(&mut out, &generals);
    }
    let binaries: Vec<&str> = m.vars.iter().filter(|v| v.kind == VarKind::Binary).map(|v| v.name.as_str()).collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        name_list(&mut out, &binaries);
    }
    out.push_str("End\n");
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Head,
    Objective,
    Rows,
    Bounds,
    Generals,
    Binaries,
    End,
}

fn section_of(line: &str) -> Option<(Section, Option<ObjSense>)> {
    let l = line.trim().to_ascii_lowercase();
    Some(match l.as_str() {
        "minimize" | "minimise" | "min" => (Section::Objective, Some(ObjSense::Minimize)),
        "maximize" | "maximise" | "max" => (Section::Objective, Some(ObjSense::Maximize)),
        "subject to" | "such that" | "st" | "s.t." => (Section::Rows, None),
        "bounds" | "bound" => (Section::Bounds, None),
        "generals" | "general" | "gen" | "integers" => (Section::Generals, None),
        "binaries" | "binary" | "bin" => (Section::Binaries, None),
        "end" => (Section::End, None),
        _ => return None,
    })
}

fn parse_num(tok: &str) -> Option<f64> {
    match tok.to_ascii_lowercase().as_str() {
        "+inf" | "inf" | "+infinity" | "infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        _ => tok.parse().ok().filter(|_| tok.starts_with(|c: char| c.is_ascii_digit() || "+-.".contains(c))),
    }
}

fn parse_sense(tok: &str) -> Option<Sense> {
    match tok {
        "<=" | "=<" | "<" => Some(Sense::Le),
        ">=" | "=>" | ">" => Some(Sense::Ge),
        "=" => Some(Sense::Eq),
        _ => None,
    }
}

struct Reader {
    names: Vec<String>,
    seen: HashMap<String, usize>,
}

impl Reader {
    fn id(&mut self, name: &str) -> usize {
        if let Some(&i) = self.seen.get(name) {
            return i;
        }
        self.seen.insert(name.to_string(), self.names.len());
        self.names.push(name.to_string());
        self.names.len() - 1
    }
}

/// Expression statements as (line, tokens); a statement runs until the next
/// `name:` label.
fn statements(lines: &[(usize, String)]) -> Vec<(usize, Option<String>, Vec<String>)> {
    let mut out: Vec<(usize, Option<String>, Vec<String>)> = Vec::new();
    for (ln, text) in lines {
        let spaced = text.replace(':', ": ");
        for tok in spaced.split_whitespace() {
            if let Some(label) = tok.strip_suffix(':') {
                out.push((*ln, Some(label.to_string()), vec![]));
            } else {
                if out.is_empty() {
                    out.push((*ln, None, vec![]));
                }
                out.last_mut().unwrap().2.push(tok.to_string());
            }
        }
    }
    out
}

type Terms = Vec<(usize, f64)>;

fn parse_terms(r: &mut Reader, toks: &[String], line: usize) -> Result<(Terms, usize), MilpError> {
    let err = |msg: String| MilpError::Lp { line, msg };
    let mut out = Vec::new();
    let mut i = 0;
    while i < toks.len() && parse_sense(&toks[i]).is_none() {
        let mut sign = 1.0;
        while i < toks.len() && (toks[i] == "+" || toks[i] == "-") {
            if toks[i] == "-" {
                sign = -sign;
            }
            i += 1;
        }
        let mut coef = 1.0;
        if i < toks.len() {
            if let Some(v) = parse_num(&toks[i]) {
                coef = v;
                i += 1;
            }
        }
        let name = toks.get(i).ok_or_else(|| err("expression ends without a variable".into()))?;
        if parse_sense(name).is_some() || parse_num(name).is_some() {
            return Err(err(format!("expected a variable, found {name:?}")));
        }
        out.push((r.id(name), sign * coef));
        i += 1;
    }
    Ok((out, i))
}

/// Reads LP text produced by [`emit_lp`] (and the common subset of the format).
pub fn parse_lp(text: &str) -> Result<MilpModel, MilpError> {
    let mut section = Section::Head;
    let mut sense = ObjSense::Minimize;
    let mut metadata = BTreeMap::new();
    let mut buckets: BTreeMap<u8, Vec<(usize, String)>> = BTreeMap::new();
    let key = |s: Section| match s {
        Section::Objective => 0u8,
        Section::Rows => 1,
        Section::Bounds => 2,
        Section::Generals => 3,
        Section::Binaries => 4,
        _ => 9,
    };
    for (n, raw) in text.lines().enumerate() {
        let ln = n + 1;
        let line = raw.trim();
        if let Some(c) = line.strip_prefix('\\') {
            let mut parts = c.split_whitespace();
            if parts.next() == Some("meta") {
                if let (Some(k), Some(v)) = (parts.next(), parts.next()) {
                    metadata.insert(k.to_string(), v.to_string());
                }
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        if let Some((s, o)) = section_of(line) {
            section = s;
            if let Some(o) = o {
                sense = o;
            }
            continue;
        }
        match section {
            Section::Head => return Err(MilpError::Lp { line: ln, msg: "text before the objective section".into() }),
            Section::End => return Err(MilpError::Lp { line: ln, msg: "text after End".into() }),
            s => buckets.entry(key(s)).or_default().push((ln, line.to_string())),
        }
    }
    if section != Section::End {
        return Err(MilpError::Lp { line: text.lines().count(), msg: "missing End".into() });
    }

    let mut r = Reader { names: vec![], seen: HashMap::new() };
    // Bounds first so that their order fixes variable indices.
    let mut bounds: Vec<(usize, Option<f64>, Option<f64>)> = Vec::new();
    for (ln, line) in buckets.get(&2).cloned().unwrap_or_default() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let err = |msg: &str| MilpError::Lp { line: ln, msg: format!("{msg}: {line}") };
        let b = match toks.as_slice() {
            [x, f] if f.eq_ignore_ascii_case("free") => (r.id(x), Some(f64::NEG_INFINITY), Some(f64::INFINITY)),
            [lo, s1, x, s2, hi] if parse_sense(s1) == Some(Sense::Le) && parse_sense(s2) == Some(Sense::Le) => (
                r.id(x),
                Some(parse_num(lo).ok_or_else(|| err("bad lower bound"))?),
                Some(parse_num(hi).ok_or_else(|| err("bad upper bound"))?),
            ),
            [x, s, v] if parse_num(x).is_none() => {
                let v = parse_num(v).ok_or_else(|| err("bad bound"))?;
                match parse_sense(s) {
                    Some(Sense::Eq) => (r.id(x), Some(v), Some(v)),
                    Some(Sense::Le) => (r.id(x), None, Some(v)),
                    Some(Sense::Ge) => (r.id(x), Some(v), None),
                    None => return Err(err("bad bound")),
                }
            }
            [v, s, x] => {
                let v = parse_num(v).ok_or_else(|| err("bad bound"))?;
                match parse_sense(s) {
                    Some(Sense::Le) => (r.id(x), Some(v), None),
                    Some(Sense::Ge) => (r.id(x), None, Some(v)),
                    _ => return Err(err("bad bound")),
                }
            }
            _ => return Err(err("unrecognised bound")),
        };
        bounds.push(b);
    }

    let mut objective = Vec::new();
    for (ln, label, toks) in statements(&buckets.get(&0).cloned().unwrap_or_default()) {
        let _ = label;
        let (t, used) = parse_terms(&mut r, &toks, ln)?;
        if used != toks.len() {
            return Err(MilpError::Lp { line: ln, msg: "objective has a relational operator".into() });
        }
        objective.extend(t);
    }
    if objective.len() == 1 && objective[0].1 == 0.0 {
        objective.clear();
    }

    let mut rows = Vec::new();
    for (k, (ln, label, toks)) in statements(&buckets.get(&1).cloned().unwrap_or_default()).into_iter().enumerate() {
        let name = label.unwrap_or_else(|| format!("R{}", k + 1));
        let (coeffs, i) = parse_terms(&mut r, &toks, ln)?;
        let err = |msg: &str| MilpError::Lp { line: ln, msg: format!("{msg} in row {name}") };
        let sense = toks.get(i).and_then(|t| parse_sense(t)).ok_or_else(|| err("missing relational operator"))?;
        let mut sign = 1.0;
        let mut j = i + 1;
        while j < toks.len() && (toks[j] == "+" || toks[j] == "-") {
            if toks[j] == "-" {
                sign = -sign;
            }
            j += 1;
        }
        let rhs = toks.get(j).and_then(|t| parse_num(t)).ok_or_else(|| err("missing right-hand side"))? * sign;
        if j + 1 != toks.len() {
            return Err(err("trailing tokens"));
        }
        rows.push(Row { name, coeffs, sense, rhs });
    }

    let mut kinds: HashMap<usize, VarKind> = HashMap::new();
    for (b, kind) in [(3u8, VarKind::Integer), (4, VarKind::Binary)] {
        for (_, line) in buckets.get(&b).cloned().unwrap_or_default() {
            for tok in line.split_whitespace() {
                let id = r.id(tok);
                kinds.insert(id, kind);
            }
        }
    }

    let mut lb = vec![0.0; r.names.len()];
    let mut ub = vec![f64::INFINITY; r.names.len()];
    for (id, kind) in &kinds {
        if *kind == VarKind::Binary {
            ub[*id] = 1.0;
        }
    }
    for (id, lo, hi) in bounds {
        if let Some(v) = lo {
            lb[id] = v;
        }
        if let Some(v) = hi {
            ub[id] = v;
        }
    }
    let mut m = MilpModel::new();
    for (id, name) in r.names.iter().enumerate() {
        m.add_var(name, kinds.get(&id).copied().unwrap_or(VarKind::Continuous), lb[id], ub[id])?;
    }
    for row in rows {
        m.push_row(row)?;
    }
    m.set_objective(sense, objective);
    m.metadata = metadata;
    Ok(m)
}
