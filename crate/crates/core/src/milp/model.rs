use std::collections::{BTreeMap, HashMap};

use sha2::{Digest, Sha256};

use super::MilpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

impl VarKind {
    pub fn is_integral(&self) -> bool {
        !matches!(self, VarKind::Continuous)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Var {
    pub name: String,
    pub kind: VarKind,
    pub lb: f64,
    pub ub: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(&self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// One constraint row. Names follow `family__suffix`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn family(&self) -> &str {
        self.name.split("__").next().unwrap_or(&self.name)
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjSense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub sense: ObjSense,
    /// Empty for a pure feasibility problem.
    pub coeffs: Vec<(usize, f64)>,
}

/// Sparse linear program with integrality marks. Variables and rows keep their
/// insertion order, which fixes the emitted text.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    pub vars: Vec<Var>,
    pub rows: Vec<Row>,
    pub objective: Objective,
    /// Free-form key/value pairs carried through the LP text as comments.
    pub metadata: BTreeMap<String, String>,
    index: HashMap<String, usize>,
    row_names: HashMap<String, usize>,
}

impl Default for MilpModel {
    fn default() -> Self {
        Self::new()
    }
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    s.len() <= 255 && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

impl MilpModel {
    pub fn new() -> Self {
        MilpModel {
            vars: vec![],
            rows: vec![],
            objective: Objective { sense: ObjSense::Minimize, coeffs: vec![] },
            metadata: BTreeMap::new(),
            index: HashMap::new(),
            row_names: HashMap::new(),
        }
    }

    pub fn add_var(&mut self, name: &str, kind: VarKind, lb: f64, ub: f64) -> Result<usize, MilpError> {
        if !valid_name(name) {
            return Err(MilpError::Name(name.to_string()));
        }
        if self.index.contains_key(name) {
            return Err(MilpError::Duplicate(name.to_string()));
        }
        if lb.is_nan() || ub.is_nan() || lb > ub || lb == f64::INFINITY || ub == f64::NEG_INFINITY {
            return Err(MilpError::Bounds(name.to_string()));
        }
        let (lb, ub) = if kind == VarKind::Binary { (lb.max(0.0), ub.min(1.0)) } else { (lb, ub) };
        if kind.is_integral() && (!lb.is_finite() || !ub.is_finite()) {
            return Err(MilpError::Bounds(name.to_string()));
        }
        let id = self.vars.len();
        self.vars.push(Var { name: name.to_string(), kind, lb, ub });
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn expect_var(&self, name: &str) -> Result<usize, MilpError> {
        self.var(name).ok_or_else(|| MilpError::UnknownVar(name.to_string()))
    }

    pub fn row(&self, name: &str) -> Option<&Row> {
        self.row_names.get(name).map(|&i| &self.rows[i])
    }

    /// Adds `sum coeffs (sense) rhs` as row `family__suffix`. Repeated variables are
    /// merged; a row whose coefficients all cancel keeps a single zero term so that
    /// its (possibly contradictory) right-hand side survives emission.
    pub fn add_row(
        &mut self,
        family: &str,
        suffix: &str,
        coeffs: impl IntoIterator<Item = (usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<(), MilpError> {
        let name = if suffix.is_empty() { family.to_string() } else { format!("{family}__{suffix}") };
        self.push_row(Row { name, coeffs: coeffs.into_iter().collect(), sense, rhs })
    }

    pub(crate) fn push_row(&mut self, mut row: Row) -> Result<(), MilpError> {
        if !valid_name(&row.name) {
            return Err(MilpError::Name(row.name));
        }
        if self.row_names.contains_key(&row.name) {
            return Err(MilpError::Duplicate(row.name));
        }
        if !row.rhs.is_finite() {
            return Err(MilpError::Bounds(row.name));
        }
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.coeffs.len());
        let mut pos: HashMap<usize, usize> = HashMap::new();
        for &(j, a) in &row.coeffs {
            if j >= self.vars.len() {
                return Err(MilpError::UnknownVar(format!("#{j} in {}", row.name)));
            }
            if !a.is_finite() {
                return Err(MilpError::Bounds(row.name));
            }
            match pos.get(&j) {
                Some(&p) => merged[p].1 += a,
                None => {
                    pos.insert(j, merged.len());
                    merged.push((j, a));
                }
            }
        }
        let mut kept: Vec<(usize, f64)> = merged.into_iter().filter(|&(_, a)| a != 0.0).collect();
        if kept.is_empty() {
            kept.push((row.coeffs.first().map(|c| c.0).unwrap_or(0), 0.0));
        }
        row.coeffs = kept;
        self.row_names.insert(row.name.clone(), self.rows.len());
        self.rows.push(row);
        Ok(())
    }

    pub fn set_objective(&mut self, sense: ObjSense, coeffs: Vec<(usize, f64)>) {
        self.objective = Objective { sense, coeffs };
    }

    /// Row counts per constraint family.
    pub fn coverage(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for r in &self.rows {
            *m.entry(r.family().to_string()).or_insert(0) += 1;
        }
        m
    }

    pub fn integer_count(&self) -> usize {
        self.vars.iter().filter(|v| v.kind.is_integral()).count()
    }

    /// sha256 of the emitted LP text.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(super::emit_lp(self).unwrap_or_default()))
    }
}
