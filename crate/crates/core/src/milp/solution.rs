use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::simplex::{rational, solve_lp, LpOutcome, LpProblem};
use super::{MilpError, MilpModel, ObjSense, Sense};

pub const RESIDUAL_TOL: f64 = 1e-6;
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// A solution was found but optimality was not proven.
    Feasible,
    Infeasible,
    Unbounded,
}

impl SolveStatus {
    pub fn has_solution(&self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: SolveStatus,
    /// Missing names read as zero.
    pub values: BTreeMap<String, BigRational>,
}

impl Solution {
    pub fn empty(status: SolveStatus) -> Self {
        Solution { status, values: BTreeMap::new() }
    }

    pub fn get(&self, name: &str) -> BigRational {
        self.values.get(name).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn get_f64(&self, name: &str) -> f64 {
        self.values.get(name).map(|v| v.to_f64().unwrap_or(f64::NAN)).unwrap_or(0.0)
    }

    /// Nearest integer to the value of `name`.
    pub fn get_int(&self, name: &str) -> i64 {
        self.get(name).round().to_integer().to_i64().unwrap_or(i64::MAX)
    }

    /// Whether the binary or integer `name` takes value 1.
    pub fn is_on(&self, name: &str) -> bool {
        self.get_int(name) == 1
    }

    pub fn objective(&self, m: &MilpModel) -> BigRational {
        let mut z = BigRational::zero();
        for &(j, a) in &m.objective.coeffs {
            z += rational(a) * self.get(&m.vars[j].name);
        }
        z
    }

    /// Name to value, values written as exact fractions.
    pub fn to_json(&self) -> String {
        let values: BTreeMap<&str, String> =
            self.values.iter().filter(|(_, v)| !v.is_zero()).map(|(k, v)| (k.as_str(), v.to_string())).collect();
        serde_json::to_string_pretty(&serde_json::json!({ "status": self.status.as_str(), "values": values }))
            .expect("solution serializes")
    }

    pub(crate) fn from_f64(status: SolveStatus, m: &MilpModel, x: &[f64]) -> Self {
        let values = m
            .vars
            .iter()
            .zip(x)
            .map(|(v, &val)| {
                let r = if v.kind.is_integral() { BigRational::from_integer(BigInt::from(val.round() as i64)) } else { rational(val) };
                (v.name.clone(), r)
            })
            .collect();
        Solution { status, values }
    }
}

fn tol(x: f64) -> BigRational {
    rational(x)
}

/// Verifies bounds, integrality and every row in exact arithmetic.
pub fn check_solution(m: &MilpModel, sol: &Solution) -> Result<(), MilpError> {
    let t = tol(RESIDUAL_TOL);
    let ti = tol(INTEGRALITY_TOL);
    let x: Vec<BigRational> = m.vars.iter().map(|v| sol.get(&v.name)).collect();
    let mut bad = Vec::new();
    for (v, val) in m.vars.iter().zip(&x) {
        if v.lb.is_finite() && *val < rational(v.lb) - &t {
            bad.push(format!("{} = {} below {}", v.name, val, v.lb));
        }
        if v.ub.is_finite() && *val > rational(v.ub) + &t {
            bad.push(format!("{} = {} above {}", v.name, val, v.ub));
        }
        if v.kind.is_integral() && (val - val.round()).abs() > ti {
            bad.push(format!("{} = {} is not integral", v.name, val));
        }
    }
    for r in &m.rows {
        let mut act = BigRational::zero();
        for &(j, a) in &r.coeffs {
            if a != 0.0 {
                act += rational(a) * &x[j];
            }
        }
        let rhs = rational(r.rhs);
        let viol = match r.sense {
            Sense::Le => &act - &rhs,
            Sense::Ge => &rhs - &act,
            Sense::Eq => (&act - &rhs).abs(),
        };
        if viol > t {
            bad.push(format!("row {} violated by {}", r.name, viol.to_f64().unwrap_or(f64::NAN)));
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        let n = bad.len();
        bad.truncate(5);
        Err(MilpError::Residual(format!("{n} violations, first: {}", bad.join("; "))))
    }
}

/// Rounds the integer part of `raw` and re-solves the continuous part exactly.
pub fn polish(m: &MilpModel, raw: &Solution) -> Result<Solution, MilpError> {
    let n = m.vars.len();
    let mut fixed: Vec<Option<BigRational>> = vec![None; n];
    let mut lb: Vec<Option<BigRational>> = vec![None; n];
    let mut ub: Vec<Option<BigRational>> = vec![None; n];
    for (j, v) in m.vars.iter().enumerate() {
        if v.kind.is_integral() {
            fixed[j] = Some(raw.get(&v.name).round());
        } else {
            lb[j] = v.lb.is_finite().then(|| rational(v.lb));
            ub[j] = v.ub.is_finite().then(|| rational(v.ub));
        }
    }
    // singleton rows become bounds until nothing changes
    let mut live: Vec<bool> = vec![true; m.rows.len()];
    loop {
        let mut changed = false;
        for (ri, r) in m.rows.iter().enumerate() {
            if !live[ri] {
                continue;
            }
            let mut rest = rational(r.rhs);
            let mut free = Vec::new();
            for &(j, a) in &r.coeffs {
                match &fixed[j] {
                    Some(v) => rest -= rational(a) * v,
                    None if a != 0.0 => free.push((j, a)),
                    None => {}
                }
            }
            match free.len() {
                0 => {
                    live[ri] = false;
                    changed = true;
                }
                1 => {
                    let (j, a) = free[0];
                    let bound = rest / rational(a);
                    let sense = if a < 0.0 {
                        match r.sense {
                            Sense::Le => Sense::Ge,
                            Sense::Ge => Sense::Le,
                            Sense::Eq => Sense::Eq,
                        }
                    } else {
                        r.sense
                    };
                    if matches!(sense, Sense::Le | Sense::Eq) && ub[j].as_ref().map_or(true, |u| bound < *u) {
                        ub[j] = Some(bound.clone());
                    }
                    if matches!(sense, Sense::Ge | Sense::Eq) && lb[j].as_ref().map_or(true, |l| bound > *l) {
                        lb[j] = Some(bound);
                    }
                    live[ri] = false;
                    changed = true;
                }
                _ => {}
            }
        }
        for j in 0..n {
            if fixed[j].is_none() {
                if let (Some(l), Some(u)) = (&lb[j], &ub[j]) {
                    if l == u {
                        fixed[j] = Some(l.clone());
                        changed = true;
                    } else if l > u {
                        return Err(MilpError::Residual(format!(
                            "continuous variable {} has no value with the integer part fixed",
                            m.vars[j].name
                        )));
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let free: Vec<usize> = (0..n).filter(|&j| fixed[j].is_none()).collect();
    if !free.is_empty() {
        let pos: BTreeMap<usize, usize> = free.iter().enumerate().map(|(p, &j)| (j, p)).collect();
        let mut rows = Vec::new();
        for (ri, r) in m.rows.iter().enumerate() {
            if !live[ri] {
                continue;
            }
            let mut rest = rational(r.rhs);
            let mut coeffs = Vec::new();
            for &(j, a) in &r.coeffs {
                match &fixed[j] {
                    Some(v) => rest -= rational(a) * v,
                    None => coeffs.push((pos[&j], rational(a))),
                }
            }
            rows.push((coeffs, r.sense, rest));
        }
        let sign = if m.objective.sense == ObjSense::Maximize { -1.0 } else { 1.0 };
        let mut cost = vec![BigRational::zero(); free.len()];
        for &(j, a) in &m.objective.coeffs {
            if let Some(&p) = pos.get(&j) {
                cost[p] += rational(sign * a);
            }
        }
        let lp = LpProblem {
            lb: free.iter().map(|&j| lb[j].clone()).collect(),
            ub: free.iter().map(|&j| ub[j].clone()).collect(),
            rows,
            cost,
        };
        match solve_lp(&lp, 100_000) {
            LpOutcome::Optimal { x, .. } => {
                for (p, &j) in free.iter().enumerate() {
                    fixed[j] = Some(x[p].clone());
                }
            }
            other => {
                return Err(MilpError::Residual(format!(
                    "exact re-solve of the continuous part with the integer part fixed: {other:?}"
                )))
            }
        }
    }
    let values = m.vars.iter().zip(fixed).map(|(v, x)| (v.name.clone(), x.expect("every variable valued"))).collect();
    Ok(Solution { status: raw.status, values })
}
