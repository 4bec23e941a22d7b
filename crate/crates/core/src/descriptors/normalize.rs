use serde::{Deserialize, Serialize};

use super::{DescriptorError, FeatureVector};

/// Per-descriptor minimum and maximum over a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormalizationParams {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, DescriptorError> {
        let k = rows.first().ok_or(DescriptorError::EmptyDataset)?.len();
        let mut min = vec![f64::INFINITY; k];
        let mut max = vec![f64::NEG_INFINITY; k];
        for r in rows {
            if r.len() != k {
                return Err(DescriptorError::Length { expected: k, found: r.len() });
            }
            for (i, &x) in r.iter().enumerate() {
                min[i] = min[i].min(x);
                max[i] = max[i].max(x);
            }
        }
        Ok(NormalizationParams { min, max })
    }

    pub fn from_features(fvs: &[FeatureVector]) -> Result<Self, DescriptorError> {
        let rows: Vec<Vec<f64>> = fvs.iter().map(|f| f.to_f64()).collect();
        Self::from_rows(&rows)
    }

    pub fn len(&self) -> usize {
        self.min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min.is_empty()
    }

    pub fn is_constant(&self, i: usize) -> bool {
        self.max[i] <= self.min[i]
    }

    /// `(x - min) / (max - min)` per coordinate; constant coordinates map to 0.
    pub fn normalize(&self, x: &[f64]) -> Result<Vec<f64>, DescriptorError> {
        if x.len() != self.len() {
            return Err(DescriptorError::Length { expected: self.len(), found: x.len() });
        }
        Ok(x.iter()
            .enumerate()
            .map(|(i, &v)| if self.is_constant(i) { 0.0 } else { (v - self.min[i]) / (self.max[i] - self.min[i]) })
            .collect())
    }

    pub fn normalize_features(&self, fv: &FeatureVector) -> Result<Vec<f64>, DescriptorError> {
        self.normalize(&fv.to_f64())
    }

    /// Inverse of [`Self::normalize`]; constant coordinates map back to their value.
    pub fn denormalize(&self, xhat: &[f64]) -> Result<Vec<f64>, DescriptorError> {
        if xhat.len() != self.len() {
            return Err(DescriptorError::Length { expected: self.len(), found: xhat.len() });
        }
        Ok(xhat
            .iter()
            .enumerate()
            .map(|(i, &v)| self.min[i] + if self.is_constant(i) { 0.0 } else { v * (self.max[i] - self.min[i]) })
            .collect())
    }
}
