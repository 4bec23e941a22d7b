//! Feature vectors of the two-layered model and the descriptor universe they live in.

mod featurize;
mod normalize;
mod space;
mod table;

pub use featurize::{featurize, raw_descriptors, FeatureVector, RawDescriptors};
pub use normalize::NormalizationParams;
pub use space::{build_space, Block, DescriptorSpace, SPACE_VERSION};
pub use table::{read_feature_csv, write_feature_csv, FeatureTable};

pub use crate::chemgraph::AdjacencyConfig;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::chemgraph::{ElementSpec, GraphError};

#[derive(Debug, Error)]
pub enum DescriptorError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{0} does not occur in the descriptor space")]
    OutOfSpace(String),
    #[error("expected {expected} values, got {found}")]
    Length { expected: usize, found: usize },
    #[error("feature table: {0}")]
    Table(String),
    #[error("descriptor space: {0}")]
    Space(String),
}

/// Element together with its hydrogen-suppressed degree, written e.g. `C3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChemicalSymbol {
    pub element: ElementSpec,
    pub degree: u8,
}

impl fmt::Display for ChemicalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.element, self.degree)
    }
}

impl FromStr for ChemicalSymbol {
    type Err = DescriptorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DescriptorError::Space(format!("bad chemical symbol {s:?}"));
        let (head, d) = s.split_at(s.len().checked_sub(1).ok_or_else(bad)?);
        let degree: u8 = d.parse().map_err(|_| bad())?;
        if !(1..=4).contains(&degree) {
            return Err(bad());
        }
        Ok(ChemicalSymbol { element: head.parse().map_err(|_| bad())?, degree })
    }
}

/// Edge configuration `(mu, mu_prime, order)` kept with `mu <= mu_prime`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeConfig {
    pub mu: ChemicalSymbol,
    pub mu_prime: ChemicalSymbol,
    pub order: u8,
}

impl EdgeConfig {
    pub fn new(a: ChemicalSymbol, b: ChemicalSymbol, order: u8) -> Self {
        if a <= b {
            EdgeConfig { mu: a, mu_prime: b, order }
        } else {
            EdgeConfig { mu: b, mu_prime: a, order }
        }
    }
}

impl fmt::Display for EdgeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}_{}", self.mu, self.mu_prime, self.order)
    }
}

#[derive(Serialize, Deserialize)]
struct EdgeConfigRepr {
    mu: String,
    mu_prime: String,
    order: u8,
}

impl Serialize for EdgeConfig {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        EdgeConfigRepr { mu: self.mu.to_string(), mu_prime: self.mu_prime.to_string(), order: self.order }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for EdgeConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = EdgeConfigRepr::deserialize(d)?;
        let mu = r.mu.parse().map_err(serde::de::Error::custom)?;
        let mu_prime = r.mu_prime.parse().map_err(serde::de::Error::custom)?;
        if !(1..=3).contains(&r.order) {
            return Err(serde::de::Error::custom(format!("edge configuration order {}", r.order)));
        }
        Ok(EdgeConfig::new(mu, mu_prime, r.order))
    }
}
