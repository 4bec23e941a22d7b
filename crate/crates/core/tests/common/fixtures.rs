//! Fixture files under `tests/fixtures`, and the generators they were written from.
//! `CHEMLP_BLESS=1` rewrites the files.

use std::path::PathBuf;

use chemlp::chemgraph::{parse_sdf_named, write_sdf, ChemicalGraph};
use chemlp::topospec::TopologicalSpecification;

use super::roundtrip::{dataset, instances, property, targets, Instance};

pub const INFEASIBLE: [&str; 3] = ["interior_shortfall", "valence_clash", "fringe_count_clash"];

pub fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Record names of `dataset()`: the targets by name, then `rand_01`, ...
pub fn dataset_names() -> Vec<String> {
    let named: Vec<String> = targets().into_iter().map(|t| t.0.to_string()).collect();
    let n = dataset().len();
    (0..n).map(|i| named.get(i).cloned().unwrap_or_else(|| format!("rand_{:02}", i - named.len() + 1))).collect()
}

/// (relative path, contents) of every generated fixture file.
pub fn generated() -> Vec<(String, String)> {
    let data = dataset();
    let names = dataset_names();
    let records: Vec<(&str, &ChemicalGraph)> = names.iter().map(String::as_str).zip(data.iter()).collect();
    let mut out = vec![("roundtrip/dataset.sdf".to_string(), write_sdf(&records))];
    let mut csv = String::from("id,value\n");
    for (n, g) in names.iter().zip(&data) {
        csv.push_str(&format!("{n},{}\n", property(g)));
    }
    out.push(("roundtrip/targets.csv".to_string(), csv));
    for inst in instances() {
        out.push((format!("roundtrip/specs/{}.json", inst.name), inst.spec.to_json() + "\n"));
    }
    out
}

pub fn read(rel: &str) -> String {
    std::fs::read_to_string(dir().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn load_dataset() -> Vec<(String, ChemicalGraph)> {
    parse_sdf_named(&read("roundtrip/dataset.sdf")).into_iter().map(|(n, g)| (n, g.unwrap())).collect()
}

/// Round-trip instances read back from the fixture files, smallest first.
pub fn load_instances() -> Vec<Instance> {
    let data = load_dataset();
    targets()
        .into_iter()
        .map(|(name, _, _)| {
            let spec = TopologicalSpecification::from_json(&read(&format!("roundtrip/specs/{name}.json"))).unwrap();
            let target = data.iter().find(|(n, _)| n == name).unwrap().1.clone();
            Instance { name, target, spec }
        })
        .collect()
}

pub fn load_infeasible() -> Vec<(&'static str, TopologicalSpecification)> {
    INFEASIBLE
        .iter()
        .map(|&n| (n, TopologicalSpecification::from_json(&read(&format!("infeasible/{n}.json"))).unwrap()))
        .collect()
}
