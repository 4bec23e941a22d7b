use std::fs;
use std::path::Path;
use std::time::Instant;

use chemlp::chemgraph::{parse_sdf_named, write_sdf, ChemicalGraph};
use chemlp::descriptors::{build_space, featurize, read_feature_csv, write_feature_csv, DescriptorSpace, FeatureTable};
use chemlp::milp::{build_model, decode, emit_lp, solve, BuildOptions, MilpError, SolveStatus};
use chemlp::regression::{select_lambda, standardized_problem, LassoOptions, LinearPredictor};
use chemlp::descriptors::NormalizationParams;
use chemlp::topospec::{check_graph_satisfies, TopologicalSpecification};
use serde_json::json;

use crate::config::ProjectConfig;
use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn load_space(path: &Path) -> Result<DescriptorSpace, CliError> {
    DescriptorSpace::from_json(&read(path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn load_predictor(path: &Path) -> Result<LinearPredictor, CliError> {
    LinearPredictor::from_json(&read(path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn load_spec(path: &Path) -> Result<TopologicalSpecification, CliError> {
    TopologicalSpecification::from_json(&read(path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// A graph from an `.sdf`/`.mol` file (first record) or graph JSON.
pub fn load_graph(path: &Path) -> Result<ChemicalGraph, CliError> {
    let text = read(path)?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    if ext == "sdf" || ext == "mol" {
        let (_, g) = parse_sdf_named(&text)
            .into_iter()
            .next()
            .ok_or_else(|| CliError::input(format!("{}: no records", path.display())))?;
        g.map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    } else {
        ChemicalGraph::from_json_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }
}

pub fn run_featurize(cfg: &ProjectConfig) -> Result<(), CliError> {
    let records = parse_sdf_named(&read(&cfg.dataset)?);
    if records.is_empty() {
        return Err(CliError::input(format!("{}: dataset is empty", cfg.dataset.display())));
    }
    let mut ids = Vec::new();
    let mut graphs = Vec::new();
    for (name, r) in records {
        match r {
            Ok(g) => {
                ids.push(name);
                graphs.push(g);
            }
            Err(e) => eprintln!("skipped: {e}"),
        }
    }
    if graphs.is_empty() {
        return Err(CliError::input("no record of the dataset parsed"));
    }
    let space = build_space(&graphs, cfg.rho).map_err(|e| CliError::input(e.to_string()))?;
    let mut fvs = Vec::new();
    let mut kept = Vec::new();
    for (id, g) in ids.iter().zip(&graphs) {
        match featurize(g, &space) {
            Ok(f) => {
                fvs.push(f);
                kept.push(id.clone());
            }
            Err(e) => eprintln!("skipped {id}: {e}"),
        }
    }
    if fvs.is_empty() {
        return Err(CliError::input("no graph of the dataset could be featurized"));
    }
    let table = FeatureTable::from_features(space.names(), kept, &fvs);
    let mut csv = Vec::new();
    write_feature_csv(&mut csv, &table).map_err(|e| CliError::input(e.to_string()))?;
    write(&cfg.features_path(), &String::from_utf8(csv).expect("csv is utf-8"))?;
    write(&cfg.space_path(), &(space.to_json() + "\n"))?;
    println!("{} graphs, K = {}", table.ids.len(), space.k());
    println!("wrote {} and {}", cfg.features_path().display(), cfg.space_path().display());
    Ok(())
}

fn read_targets(path: &Path) -> Result<Vec<(String, f64)>, CliError> {
    let text = read(path)?;
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let (Some(id), Some(v)) = (rec.get(0), rec.get(1)) else {
            return Err(CliError::input(format!("{}: row {} needs id and value", path.display(), i + 1)));
        };
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::input(format!("{}: row {}: bad value {v:?}", path.display(), i + 1)))?;
        out.push((id.trim().to_string(), v));
    }
    Ok(out)
}

pub fn run_train(cfg: &ProjectConfig) -> Result<(), CliError> {
    let features = cfg.features_path();
    if !features.is_file() {
        return Err(CliError::input(format!("{} is missing; run featurize first", features.display())));
    }
    let table = read_feature_csv(read(&features)?.as_bytes()).map_err(|e| CliError::input(e.to_string()))?;
    let space = load_space(&cfg.space_path())?;
    if table.names != space.names() {
        return Err(CliError::input("feature columns do not match the descriptor space"));
    }
    let targets = read_targets(&cfg.targets)?;
    if targets.len() != table.ids.len() || targets.iter().zip(&table.ids).any(|((a, _), b)| a != b) {
        let at = targets.iter().zip(&table.ids).position(|((a, _), b)| a != b).unwrap_or(targets.len().min(table.ids.len()));
        return Err(CliError::input(format!(
            "target ids do not match feature ids (first difference at row {}; {} targets, {} feature rows)",
            at + 1,
            targets.len(),
            table.ids.len()
        )));
    }
    let y: Vec<f64> = targets.iter().map(|t| t.1).collect();
    let params = NormalizationParams::from_rows(&table.rows).map_err(|e| CliError::input(e.to_string()))?;
    let (x, ys, _, _) = standardized_problem(&table.rows, &y, &params).map_err(|e| CliError::input(e.to_string()))?;
    let opts = LassoOptions::default();
    let (reports, best) = select_lambda(x.view(), ys.view(), &cfg.lambda_grid, cfg.cv_executions, cfg.seed, &opts)
        .map_err(|e| CliError::input(e.to_string()))?;
    println!("{:>12}  {:>8}  {:>10}", "lambda", "K'", "test R2");
    for (i, r) in reports.iter().enumerate() {
        let mark = if i == best { " *" } else { "" };
        println!("{:>12.3e}  {:>8.1}  {:>10.4}{mark}", r.lambda, r.mean_selected, r.median_r2);
    }
    let lambda = cfg.lambda_grid[best];
    let (p, _) = LinearPredictor::train(&table.rows, &y, lambda, space.names(), space.hash(), &opts)
        .map_err(|e| CliError::input(e.to_string()))?;
    write(&cfg.predictor_path(), &(p.to_json() + "\n"))?;
    let report = serde_json::to_string_pretty(&json!({ "selected": lambda, "reports": reports })).expect("report serializes");
    write(&cfg.output_dir.join("cv_report.json"), &(report + "\n"))?;
    println!("selected lambda {lambda:e}; wrote {}", cfg.predictor_path().display());
    Ok(())
}

/// Solves for a graph whose predicted property lies in `[y_lo, y_hi]`, given in the
/// property's own units.
pub fn run_infer(cfg: &ProjectConfig, y_lo: f64, y_hi: f64) -> Result<(), CliError> {
    if !(y_lo <= y_hi) {
        return Err(CliError::input(format!("empty target interval [{y_lo}, {y_hi}]")));
    }
    let space = load_space(&cfg.space_path())?;
    let p = load_predictor(&cfg.predictor_path())?;
    let spec = load_spec(&cfg.spec)?;
    p.check_space(&space).map_err(|e| CliError::input(e.to_string()))?;
    let (lo, hi) = (p.standardize(y_lo), p.standardize(y_hi));
    let m = build_model(&spec, &space, &p, lo, hi, &BuildOptions::default()).map_err(|e| match e {
        MilpError::Precondition(s) => CliError::input(s),
        e => CliError::input(e.to_string()),
    })?;
    if let Some(w) = m.metadata.get("warning_constant_weighted") {
        eprintln!("warning: constant descriptors with nonzero weight: {w}");
    }
    write(&cfg.output_dir.join("model.lp"), &emit_lp(&m).map_err(|e| CliError::input(e.to_string()))?)?;
    let backend = cfg.solver.backend(&cfg.output_dir.join("solver"));
    let t = Instant::now();
    let sol = solve(&m, &backend).map_err(|e| CliError::Solver(e.to_string()))?;
    let secs = t.elapsed().as_secs_f64();
    let mut log = json!({
        "status": sol.status.as_str(),
        "seconds": secs,
        "interval": [y_lo, y_hi],
        "interval_standardized": [lo, hi],
        "variables": m.vars.len(),
        "integer_variables": m.integer_count(),
        "constraints": m.rows.len(),
    });
    if !sol.status.has_solution() {
        write(&cfg.output_dir.join("solve_log.json"), &(serde_json::to_string_pretty(&log).unwrap() + "\n"))?;
        println!("status: {}", sol.status.as_str());
        return if sol.status == SolveStatus::Infeasible {
            Err(CliError::Infeasible)
        } else {
            Err(CliError::Solver(format!("solver returned {}", sol.status.as_str())))
        };
    }
    let g = decode(&sol, &spec, &space).map_err(|e| CliError::Solver(e.to_string()))?;
    let fv = featurize(&g, &space).map_err(|e| CliError::Solver(e.to_string()))?;
    let yhat = p.predict(&fv, &space).map_err(|e| CliError::Solver(e.to_string()))?;
    let rep = check_graph_satisfies(&spec, &g);
    let failures: Vec<String> = rep.failures().iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
    log["verification"] = json!({
        "predicted": p.destandardize(yhat),
        "predicted_standardized": yhat,
        "spec_passed": rep.passed(),
        "spec_failures": failures,
    });
    write(&cfg.output_dir.join("inferred.json"), &(g.to_json_string() + "\n"))?;
    write(&cfg.output_dir.join("inferred.sdf"), &write_sdf(&[("inferred", &g)]))?;
    write(&cfg.output_dir.join("solution.json"), &(sol.to_json() + "\n"))?;
    write(&cfg.output_dir.join("solve_log.json"), &(serde_json::to_string_pretty(&log).unwrap() + "\n"))?;
    println!("status: {} in {secs:.2} s", sol.status.as_str());
    println!("predicted {} (interval [{y_lo}, {y_hi}])", p.destandardize(yhat));
    println!("specification: {}", if rep.passed() { "satisfied" } else { "VIOLATED" });
    println!("wrote {}", cfg.output_dir.join("inferred.json").display());
    if !rep.passed() {
        return Err(CliError::Solver(format!("decoded graph fails the specification: {}", failures.join("; "))));
    }
    Ok(())
}

/// Featurizes, predicts and checks a graph; fails when any step fails or the
/// prediction falls outside the optional interval.
pub fn run_verify(
    graph: &Path,
    spec: &Path,
    predictor: &Path,
    space: &Path,
    interval: Option<(f64, f64)>,
) -> Result<(), CliError> {
    let g = load_graph(graph)?;
    let spec = load_spec(spec)?;
    let p = load_predictor(predictor)?;
    let space = load_space(space)?;
    let mut ok = true;
    match featurize(&g, &space).map_err(|e| e.to_string()).and_then(|fv| {
        let y = p.predict(&fv, &space).map_err(|e| e.to_string())?;
        Ok((fv, y))
    }) {
        Ok((fv, y)) => {
            let nz = fv.values.iter().filter(|v| **v != 0.into()).count();
            println!("featurize: ok ({} descriptors, {nz} nonzero)", fv.len());
            let value = p.destandardize(y);
            print!("predict: {value}");
            if let Some((lo, hi)) = interval {
                let inside = value >= lo && value <= hi;
                ok &= inside;
                print!(" {} [{lo}, {hi}]", if inside { "inside" } else { "OUTSIDE" });
            }
            println!();
        }
        Err(e) => {
            ok = false;
            println!("featurize/predict: FAIL {e}");
        }
    }
    let rep = check_graph_satisfies(&spec, &g);
    if rep.passed() {
        println!("specification: pass");
    } else {
        ok = false;
        for c in rep.failures() {
            println!("specification: FAIL {}: {}", c.name, c.detail);
        }
    }
    if ok {
        Ok(())
    } else {
        Err(CliError::Failed)
    }
}
