//! Depth-first branch-and-bound over floating-point LP relaxations, with activity
//! based bound propagation at every node. Candidate solutions are confirmed in exact
//! arithmetic before they are accepted.

use std::time::{Duration, Instant};

use super::simplex::{solve_lp, LpOutcome, LpProblem};
use super::solution::{check_solution, polish};
use super::{MilpError, MilpModel, ObjSense, Sense, Solution, SolveStatus};

#[derive(Debug, Clone)]
pub struct MiniOptions {
    pub node_limit: usize,
    pub time_limit: Duration,
    /// Pivot cap for one relaxation.
    pub lp_iterations: usize,
}

impl Default for MiniOptions {
    fn default() -> Self {
        MiniOptions { node_limit: 500_000, time_limit: Duration::from_secs(600), lp_iterations: 100_000 }
    }
}

const FEAS: f64 = 1e-7;
const INT: f64 = 1e-6;

struct Problem<'a> {
    m: &'a MilpModel,
    integral: Vec<bool>,
    /// Minimisation costs.
    cost: Vec<f64>,
}

struct Node {
    lb: Vec<f64>,
    ub: Vec<f64>,
}

enum Relaxation {
    Infeasible,
    Unbounded,
    Solved { x: Vec<f64>, objective: f64 },
}

impl<'a> Problem<'a> {
    fn new(m: &'a MilpModel) -> Self {
        let sign = if m.objective.sense == ObjSense::Maximize { -1.0 } else { 1.0 };
        let mut cost = vec![0.0; m.vars.len()];
        for &(j, a) in &m.objective.coeffs {
            cost[j] += sign * a;
        }
        Problem { m, integral: m.vars.iter().map(|v| v.kind.is_integral()).collect(), cost }
    }

    /// Tightens bounds from row activities; false when a row cannot be met.
    fn propagate(&self, lb: &mut [f64], ub: &mut [f64]) -> bool {
        self.propagate_at(lb, ub).is_ok()
    }

    /// Bound propagation; on a conflict returns the index of the row that failed.
    fn propagate_at(&self, lb: &mut [f64], ub: &mut [f64]) -> Result<(), usize> {
        for _ in 0..50 {
            let mut changed = false;
            for (ri, r) in self.m.rows.iter().enumerate() {
                // activity range, counting infinite contributions separately
                let (mut lo, mut lo_inf, mut hi, mut hi_inf) = (0.0, 0usize, 0.0, 0usize);
                for &(j, a) in &r.coeffs {
                    let (l, u) = if a > 0.0 { (lb[j], ub[j]) } else { (ub[j], lb[j]) };
                    if l.is_finite() {
                        lo += a * l;
                    } else {
                        lo_inf += 1;
                    }
                    if u.is_finite() {
                        hi += a * u;
                    } else {
                        hi_inf += 1;
                    }
                }
                let le = matches!(r.sense, Sense::Le | Sense::Eq);
                let ge = matches!(r.sense, Sense::Ge | Sense::Eq);
                if le && lo_inf == 0 && lo > r.rhs + FEAS {
                    return Err(ri);
                }
                if ge && hi_inf == 0 && hi < r.rhs - FEAS {
                    return Err(ri);
                }
                for &(j, a) in &r.coeffs {
                    if a == 0.0 {
                        continue;
                    }
                    let (l, u) = if a > 0.0 { (lb[j], ub[j]) } else { (ub[j], lb[j]) };
                    // activity of the other terms
                    if le {
                        let others = if l.is_finite() {
                            (lo_inf == 0).then(|| lo - a * l)
                        } else {
                            (lo_inf == 1).then_some(lo)
                        };
                        if let Some(o) = others {
                            let bound = (r.rhs - o) / a;
                            changed |= self.tighten(j, a > 0.0, bound, lb, ub);
                        }
                    }
                    if ge {
                        let others = if u.is_finite() {
                            (hi_inf == 0).then(|| hi - a * u)
                        } else {
                            (hi_inf == 1).then_some(hi)
                        };
                        if let Some(o) = others {
                            let bound = (r.rhs - o) / a;
                            changed |= self.tighten(j, a < 0.0, bound, lb, ub);
                        }
                    }
                    if lb[j] > ub[j] + FEAS {
                        return Err(ri);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Ok(())
    }

    /// Applies `x <= bound` (`upper`) or `x >= bound`.
    fn tighten(&self, j: usize, upper: bool, bound: f64, lb: &mut [f64], ub: &mut [f64]) -> bool {
        if upper {
            let b = if self.integral[j] { (bound + INT).floor() } else { bound };
            if b < ub[j] - FEAS.max(1e-9 * b.abs()) {
                let big = b < ub[j] - 1e-4;
                ub[j] = b;
                return self.integral[j] || big;
            }
        } else {
            let b = if self.integral[j] { (bound - INT).ceil() } else { bound };
            if b > lb[j] + FEAS.max(1e-9 * b.abs()) {
                let big = b > lb[j] + 1e-4;
                lb[j] = b;
                return self.integral[j] || big;
            }
        }
        false
    }

    fn relax(&self, lb: &[f64], ub: &[f64], iterations: usize) -> Result<Relaxation, MilpError> {
        let n = lb.len();
        let fixed: Vec<bool> = (0..n).map(|j| ub[j] - lb[j] <= 1e-9).collect();
        let mut pos = vec![usize::MAX; n];
        let mut free = Vec::new();
        for j in 0..n {
            if !fixed[j] {
                pos[j] = free.len();
                free.push(j);
            }
        }
        let mut rows = Vec::new();
        for r in &self.m.rows {
            let mut rhs = r.rhs;
            let mut coeffs = Vec::new();
            let (mut lo, mut hi) = (0.0, 0.0);
            for &(j, a) in &r.coeffs {
                if fixed[j] {
                    rhs -= a * lb[j];
                } else if a != 0.0 {
                    coeffs.push((pos[j], a));
                    let (l, u) = if a > 0.0 { (lb[j], ub[j]) } else { (ub[j], lb[j]) };
                    lo += a * l;
                    hi += a * u;
                }
            }
            if coeffs.is_empty() {
                let ok = match r.sense {
                    Sense::Le => rhs >= -FEAS,
                    Sense::Ge => rhs <= FEAS,
                    Sense::Eq => rhs.abs() <= FEAS,
                };
                if !ok {
                    return Ok(Relaxation::Infeasible);
                }
                continue;
            }
            // rows implied by the bounds stay out of the relaxation
            let redundant = match r.sense {
                Sense::Le => hi <= rhs + 1e-12,
                Sense::Ge => lo >= rhs - 1e-12,
                Sense::Eq => false,
            };
            if !redundant {
                rows.push((coeffs, r.sense, rhs));
            }
        }
        let fin = |x: f64| x.is_finite().then_some(x);
        let lp = LpProblem {
            lb: free.iter().map(|&j| fin(lb[j])).collect(),
            ub: free.iter().map(|&j| fin(ub[j])).collect(),
            rows,
            cost: free.iter().map(|&j| self.cost[j]).collect(),
        };
        Ok(match solve_lp(&lp, iterations) {
            LpOutcome::Optimal { x: y, .. } => {
                let mut x = lb.to_vec();
                for (p, &j) in free.iter().enumerate() {
                    x[j] = y[p].clamp(lb[j], ub[j]);
                }
                let objective = (0..n).map(|j| self.cost[j] * x[j]).sum();
                Relaxation::Solved { x, objective }
            }
            LpOutcome::Infeasible => Relaxation::Infeasible,
            LpOutcome::Unbounded => Relaxation::Unbounded,
            LpOutcome::IterationLimit => {
                return Err(MilpError::Solver(format!("relaxation exceeded {iterations} pivots")))
            }
        })
    }
}

/// The built-in solver. Intended for models with a few hundred integer variables.
/// Propagates the bounds `lb`, `ub` through the rows of `m`, tightening them in place.
/// A conflict is reported with the name of the row that cannot be satisfied.
pub fn propagate_bounds(m: &MilpModel, lb: &mut [f64], ub: &mut [f64]) -> Result<(), String> {
    Problem::new(m).propagate_at(lb, ub).map_err(|ri| m.rows[ri].name.clone())
}

pub fn solve_mini(m: &MilpModel, opts: &MiniOptions) -> Result<Solution, MilpError> {
    let start = Instant::now();
    let p = Problem::new(m);
    let feasibility = m.objective.coeffs.iter().all(|&(_, a)| a == 0.0);
    let root = Node { lb: m.vars.iter().map(|v| v.lb).collect(), ub: m.vars.iter().map(|v| v.ub).collect() };
    let mut stack = vec![root];
    let mut best: Option<(f64, Solution)> = None;
    let mut nodes = 0usize;
    let mut exhausted = true;
    while let Some(mut node) = stack.pop() {
        nodes += 1;
        if nodes > opts.node_limit || start.elapsed() > opts.time_limit {
            exhausted = false;
            break;
        }
        if !p.propagate(&mut node.lb, &mut node.ub) {
            continue;
        }
        let (x, obj) = match p.relax(&node.lb, &node.ub, opts.lp_iterations)? {
            Relaxation::Infeasible => continue,
            Relaxation::Unbounded if nodes == 1 => return Ok(Solution::empty(SolveStatus::Unbounded)),
            Relaxation::Unbounded => continue,
            Relaxation::Solved { x, objective } => (x, objective),
        };
        if let Some((inc, _)) = &best {
            if obj >= inc - 1e-9 {
                continue;
            }
        }
        let branch = (0..x.len())
            .filter(|&j| p.integral[j])
            .map(|j| (j, (x[j] - x[j].round()).abs()))
            .filter(|&(_, f)| f > INT)
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(b.0.cmp(&a.0)));
        match branch {
            None => {
                let cand = Solution::from_f64(SolveStatus::Optimal, m, &x);
                let confirmed = polish(m, &cand).ok().filter(|s| check_solution(m, s).is_ok());
                if let Some(sol) = confirmed {
                    best = Some((obj, sol));
                    if feasibility {
                        break;
                    }
                }
            }
            Some((j, _)) => {
                let v = x[j];
                let mut down = Node { lb: node.lb.clone(), ub: node.ub.clone() };
                down.ub[j] = v.floor();
                let mut up = node;
                up.lb[j] = v.ceil();
                // explore the side nearer the relaxation first
                if v - v.floor() < 0.5 {
                    stack.push(up);
                    stack.push(down);
                } else {
                    stack.push(down);
                    stack.push(up);
                }
            }
        }
    }
    match best {
        Some((_, mut sol)) => {
            sol.status = if exhausted || feasibility { SolveStatus::Optimal } else { SolveStatus::Feasible };
            Ok(sol)
        }
        None if exhausted => Ok(Solution::empty(SolveStatus::Infeasible)),
        None => Err(MilpError::Timeout(start.elapsed().as_secs_f64())),
    }
}
