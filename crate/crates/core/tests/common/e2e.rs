//! Solve, decode and check one round-trip instance.

use std::time::Instant;

use chemlp::chemgraph::ChemicalGraph;
use chemlp::descriptors::{featurize, DescriptorSpace};
use chemlp::milp::{build_model, decode, emit_lp, parse_lp, rational, solve, Backend, BuildOptions, MilpModel, Solution, SolveStatus};
use chemlp::regression::LinearPredictor;
use chemlp::topospec::check_graph_satisfies;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::roundtrip::Instance;

pub const HALF_WIDTH: f64 = 0.01;

#[derive(Debug)]
pub struct RoundTrip {
    pub status: SolveStatus,
    pub secs: f64,
    /// Empty when every check passed.
    pub failures: Vec<String>,
    pub norm_residual: f64,
    pub predicted: f64,
}

pub fn model_for(inst: &Instance, space: &DescriptorSpace, p: &LinearPredictor) -> (MilpModel, f64, f64) {
    let y = p.predict(&featurize(&inst.target, space).unwrap(), space).unwrap();
    let (lo, hi) = (y - HALF_WIDTH, y + HALF_WIDTH);
    (build_model(&inst.spec, space, p, lo, hi, &BuildOptions::default()).unwrap(), lo, hi)
}

fn big(r: &num_rational::Ratio<i64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Largest violation of `(1-eps)(x-min) <= span*xhat <= (1+eps)(x-min)` over the
/// non-constant descriptors, in exact arithmetic.
pub fn normalization_residual(sol: &Solution, p: &LinearPredictor, eps: f64) -> f64 {
    let mut worst = BigRational::zero();
    for j in 0..p.weights.len() {
        let span = p.max[j] - p.min[j];
        if span == 0.0 {
            continue;
        }
        let x = sol.get(&format!("x_{}", j + 1));
        let xh = sol.get(&format!("xhat_{}", j + 1));
        let d = x - rational(p.min[j]);
        let s = rational(span) * xh;
        let lo = rational(1.0 - eps) * &d - &s;
        let hi = &s - rational(1.0 + eps) * &d;
        for r in [lo, hi] {
            if r > worst {
                worst = r;
            }
        }
    }
    worst.abs().to_f64().unwrap()
}

pub fn graph_invariants_hold(g: &ChemicalGraph) -> bool {
    ChemicalGraph::new(g.atoms().to_vec(), g.bonds().to_vec()).is_ok()
}

pub fn run(inst: &Instance, space: &DescriptorSpace, p: &LinearPredictor, backend: &Backend) -> Result<RoundTrip, String> {
    let (m, lo, hi) = model_for(inst, space, p);
    let t = Instant::now();
    let sol = solve(&m, backend).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let mut out = RoundTrip { status: sol.status, secs, failures: Vec::new(), norm_residual: f64::NAN, predicted: f64::NAN };
    if !sol.status.has_solution() {
        out.failures.push(format!("status {}", sol.status.as_str()));
        return Ok(out);
    }
    let g = match decode(&sol, &inst.spec, space) {
        Ok(g) => g,
        Err(e) => {
            out.failures.push(format!("decode: {e}"));
            return Ok(out);
        }
    };
    if !graph_invariants_hold(&g) {
        out.failures.push("decoded graph breaks a graph invariant".into());
    }
    let rep = check_graph_satisfies(&inst.spec, &g);
    if !rep.passed() {
        out.failures.push(format!("spec check: {:?}", rep.failures()));
    }
    let fv = featurize(&g, space).map_err(|e| e.to_string())?;
    let names = space.names();
    for (j, v) in fv.values.iter().enumerate() {
        let x = sol.get(&format!("x_{}", j + 1));
        if x != big(v) {
            out.failures.push(format!("{}: model {x} graph {v}", names[j]));
        }
    }
    out.predicted = p.predict(&fv, space).map_err(|e| e.to_string())?;
    if !(out.predicted >= lo - 1e-4 && out.predicted <= hi + 1e-4) {
        out.failures.push(format!("prediction {} outside [{lo}, {hi}]", out.predicted));
    }
    out.norm_residual = normalization_residual(&sol, p, chemlp::milp::DEFAULT_EPSILON);
    if out.norm_residual > 1e-9 {
        out.failures.push(format!("normalization residual {}", out.norm_residual));
    }
    Ok(out)
}

/// emit, parse, emit; the two texts must agree byte for byte.
pub fn emit_round_trip(m: &MilpModel) -> Result<(), String> {
    let a = emit_lp(m).map_err(|e| e.to_string())?;
    let back = parse_lp(&a).map_err(|e| e.to_string())?;
    let b = emit_lp(&back).map_err(|e| e.to_string())?;
    if a == b {
        Ok(())
    } else {
        let line = a.lines().zip(b.lines()).position(|(x, y)| x != y).unwrap_or(0);
        Err(format!("texts differ from line {}", line + 1))
    }
}

/// Reads `path` with HiGHS through its Python bindings; `None` when they are missing.
pub fn highs_accepts(path: &std::path::Path) -> Option<Result<(), String>> {
    let script = "import sys, highspy\nh = highspy.Highs()\nh.setOptionValue('output_flag', False)\n\
                  st = h.readModel(sys.argv[1])\nsys.exit(0 if st != highspy.HighsStatus.kError else 1)\n";
    let out = std::process::Command::new("python3").arg("-c").arg(script).arg(path).output().ok()?;
    if String::from_utf8_lossy(&out.stderr).contains("No module named 'highspy'") {
        return None;
    }
    Some(if out.status.success() { Ok(()) } else { Err(String::from_utf8_lossy(&out.stderr).into_owned()) })
}
