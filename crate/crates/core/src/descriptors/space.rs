use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{raw_descriptors, AdjacencyConfig, DescriptorError, EdgeConfig};
use crate::chemgraph::{ChemicalGraph, ElementSpec, RootedFringeTree};

pub const SPACE_VERSION: u32 = 1;

/// Number of descriptors ahead of the catalog blocks.
pub(crate) const SCALARS: usize = 14;

/// Which part of the feature vector an index belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    HeavyCount,
    Rank,
    InteriorCount,
    MassAverage,
    /// Suppressed degree `d` in 1..=4.
    Degree(usize),
    /// Interior degree `d` in 1..=4.
    InteriorDegree(usize),
    /// Interior bonds of multiplicity `m` in 2..=3.
    InteriorBond(usize),
    InteriorElement(usize),
    ExteriorElement(usize),
    EdgeConfig(usize),
    Fringe(usize),
    LeafConfig(usize),
}

/// The indexed universe behind the feature vector. Catalogs hold exactly the
/// values seen in the dataset the space was built from, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorSpace {
    pub version: u32,
    pub rho: usize,
    pub lambda_int: Vec<ElementSpec>,
    pub lambda_ex: Vec<ElementSpec>,
    pub gamma_int: Vec<EdgeConfig>,
    /// Canonical codes of the fringe configurations.
    pub fringe_catalog: Vec<String>,
    pub ac_lf: Vec<AdjacencyConfig>,
}

pub fn build_space(dataset: &[ChemicalGraph], rho: usize) -> Result<DescriptorSpace, DescriptorError> {
    if dataset.is_empty() {
        return Err(DescriptorError::EmptyDataset);
    }
    let raws = dataset.par_iter().map(|g| raw_descriptors(g, rho)).collect::<Result<Vec<_>, _>>()?;
    let mut li = BTreeSet::new();
    let mut le = BTreeSet::new();
    let mut ec = BTreeSet::new();
    let mut fc = BTreeSet::new();
    let mut ac = BTreeSet::new();
    for r in raws {
        li.extend(r.na_int.into_keys());
        le.extend(r.na_ex.into_keys());
        ec.extend(r.ec.into_keys());
        fc.extend(r.fc.into_keys());
        ac.extend(r.ac_lf.into_keys());
    }
    Ok(DescriptorSpace {
        version: SPACE_VERSION,
        rho,
        lambda_int: li.into_iter().collect(),
        lambda_ex: le.into_iter().collect(),
        gamma_int: ec.into_iter().collect(),
        fringe_catalog: fc.into_iter().collect(),
        ac_lf: ac.into_iter().collect(),
    })
}

impl DescriptorSpace {
    /// Length K of the feature vector.
    pub fn k(&self) -> usize {
        SCALARS
            + self.lambda_int.len()
            + self.lambda_ex.len()
            + self.gamma_int.len()
            + self.fringe_catalog.len()
            + self.ac_lf.len()
    }

    pub fn offset_na_int(&self) -> usize {
        SCALARS
    }

    pub fn offset_na_ex(&self) -> usize {
        self.offset_na_int() + self.lambda_int.len()
    }

    pub fn offset_ec(&self) -> usize {
        self.offset_na_ex() + self.lambda_ex.len()
    }

    pub fn offset_fc(&self) -> usize {
        self.offset_ec() + self.gamma_int.len()
    }

    pub fn offset_ac_lf(&self) -> usize {
        self.offset_fc() + self.fringe_catalog.len()
    }

    pub fn block(&self, i: usize) -> Block {
        match i {
            0 => Block::HeavyCount,
            1 => Block::Rank,
            2 => Block::InteriorCount,
            3 => Block::MassAverage,
            4..=7 => Block::Degree(i - 3),
            8..=11 => Block::InteriorDegree(i - 7),
            12 | 13 => Block::InteriorBond(i - 10),
            _ if i < self.offset_na_ex() => Block::InteriorElement(i - self.offset_na_int()),
            _ if i < self.offset_ec() => Block::ExteriorElement(i - self.offset_na_ex()),
            _ if i < self.offset_fc() => Block::EdgeConfig(i - self.offset_ec()),
            _ if i < self.offset_ac_lf() => Block::Fringe(i - self.offset_fc()),
            _ => Block::LeafConfig(i - self.offset_ac_lf()),
        }
    }

    /// Column names, in feature order.
    pub fn names(&self) -> Vec<String> {
        let mut v: Vec<String> = ["n_heavy", "rank", "n_int", "ms"].iter().map(|s| s.to_string()).collect();
        v.extend((1..=4).map(|d| format!("dg_{d}")));
        v.extend((1..=4).map(|d| format!("dgint_{d}")));
        v.extend((2..=3).map(|m| format!("bdint_{m}")));
        v.extend(self.lambda_int.iter().map(|e| format!("naint_{e}")));
        v.extend(self.lambda_ex.iter().map(|e| format!("naex_{e}")));
        v.extend(self.gamma_int.iter().map(|g| format!("ec_{g}")));
        v.extend(self.fringe_catalog.iter().map(|c| format!("fc_{c}")));
        v.extend(self.ac_lf.iter().map(|a| format!("aclf_{a}")));
        v
    }

    pub fn index_na_int(&self, e: &ElementSpec) -> Option<usize> {
        self.lambda_int.binary_search(e).ok().map(|j| self.offset_na_int() + j)
    }

    pub fn index_na_ex(&self, e: &ElementSpec) -> Option<usize> {
        self.lambda_ex.binary_search(e).ok().map(|j| self.offset_na_ex() + j)
    }

    pub fn index_ec(&self, g: &EdgeConfig) -> Option<usize> {
        self.gamma_int.binary_search(g).ok().map(|j| self.offset_ec() + j)
    }

    pub fn index_fc(&self, code: &str) -> Option<usize> {
        self.fringe_catalog
            .binary_search_by(|c| c.as_str().cmp(code))
            .ok()
            .map(|j| self.offset_fc() + j)
    }

    pub fn index_ac_lf(&self, a: &AdjacencyConfig) -> Option<usize> {
        self.ac_lf.binary_search(a).ok().map(|j| self.offset_ac_lf() + j)
    }

    /// Parsed fringe configuration `j` of the catalog.
    pub fn fringe_tree(&self, j: usize) -> RootedFringeTree {
        RootedFringeTree::from_code(&self.fringe_catalog[j]).expect("catalog codes are validated on load")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("space serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, DescriptorError> {
        let s: DescriptorSpace = serde_json::from_str(text).map_err(|e| DescriptorError::Space(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), DescriptorError> {
        if self.version != SPACE_VERSION {
            return Err(DescriptorError::Space(format!("unsupported version {}", self.version)));
        }
        if self.rho < 1 {
            return Err(DescriptorError::Space("rho must be at least 1".into()));
        }
        fn strictly_sorted<T: Ord>(v: &[T]) -> bool {
            v.windows(2).all(|w| w[0] < w[1])
        }
        let ok = strictly_sorted(&self.lambda_int)
            && strictly_sorted(&self.lambda_ex)
            && strictly_sorted(&self.gamma_int)
            && strictly_sorted(&self.fringe_catalog)
            && strictly_sorted(&self.ac_lf);
        if !ok {
            return Err(DescriptorError::Space("catalogs must be sorted without duplicates".into()));
        }
        if self.lambda_int.iter().any(|e| e.is_hydrogen()) {
            return Err(DescriptorError::Space("hydrogen cannot be an interior element".into()));
        }
        for c in &self.fringe_catalog {
            let t = RootedFringeTree::from_code(c)?;
            if t.height() > self.rho {
                return Err(DescriptorError::Space(format!("fringe tree {c} is higher than rho")));
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the compact JSON form; binds predictors to a space.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("space serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
