use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::{lasso_fit, LassoFit, LassoOptions, RegressionError};
use crate::descriptors::{DescriptorSpace, FeatureVector, NormalizationParams};

/// Linear prediction on min-max normalized descriptors, in standardized target units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearPredictor {
    pub lambda: f64,
    pub bias: f64,
    pub weights: Vec<f64>,
    pub descriptor_names: Vec<String>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub target_min: f64,
    pub target_max: f64,
    pub space_hash: String,
}

impl LinearPredictor {
    /// Normalizes the raw rows and targets, then fits the weights.
    pub fn train(
        rows: &[Vec<f64>],
        targets: &[f64],
        lambda: f64,
        descriptor_names: Vec<String>,
        space_hash: String,
        opts: &LassoOptions,
    ) -> Result<(LinearPredictor, LassoFit), RegressionError> {
        if rows.len() != targets.len() {
            return Err(RegressionError::Shape { rows: rows.len(), targets: targets.len() });
        }
        let params = NormalizationParams::from_rows(rows)?;
        if descriptor_names.len() != params.len() {
            return Err(RegressionError::Names { names: descriptor_names.len(), columns: params.len() });
        }
        let (x, y, target_min, target_max) = standardized_problem(rows, targets, &params)?;
        let fit = lasso_fit(x.view(), y.view(), lambda, opts)?;
        let p = LinearPredictor {
            lambda,
            bias: fit.bias,
            weights: fit.weights.clone(),
            descriptor_names,
            min: params.min,
            max: params.max,
            target_min,
            target_max,
            space_hash,
        };
        Ok((p, fit))
    }

    pub fn normalization(&self) -> NormalizationParams {
        NormalizationParams { min: self.min.clone(), max: self.max.clone() }
    }

    pub fn predict_normalized(&self, xhat: &[f64]) -> f64 {
        self.weights.iter().zip(xhat).map(|(w, x)| w * x).sum::<f64>() + self.bias
    }

    /// Prediction in standardized units from raw descriptor values.
    pub fn predict_raw(&self, x: &[f64]) -> Result<f64, RegressionError> {
        Ok(self.predict_normalized(&self.normalization().normalize(x)?))
    }

    pub fn predict(&self, fv: &FeatureVector, space: &DescriptorSpace) -> Result<f64, RegressionError> {
        self.check_space(space)?;
        self.predict_raw(&fv.to_f64())
    }

    pub fn check_space(&self, space: &DescriptorSpace) -> Result<(), RegressionError> {
        let h = space.hash();
        if h != self.space_hash || space.k() != self.weights.len() {
            return Err(RegressionError::SpaceMismatch { expected: self.space_hash.clone(), found: h });
        }
        Ok(())
    }

    pub fn standardize(&self, y: f64) -> f64 {
        let span = self.target_max - self.target_min;
        if span > 0.0 {
            (y - self.target_min) / span
        } else {
            0.0
        }
    }

    pub fn destandardize(&self, y: f64) -> f64 {
        self.target_min + y * (self.target_max - self.target_min)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("predictor serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, RegressionError> {
        let p: LinearPredictor = serde_json::from_str(text).map_err(|e| RegressionError::Json(e.to_string()))?;
        let k = p.weights.len();
        if p.min.len() != k || p.max.len() != k || p.descriptor_names.len() != k {
            return Err(RegressionError::Json("weights, names, min and max differ in length".into()));
        }
        Ok(p)
    }
}

/// Min-max normalized design matrix and targets scaled to [0, 1].
pub fn standardized_problem(
    rows: &[Vec<f64>],
    targets: &[f64],
    params: &NormalizationParams,
) -> Result<(Array2<f64>, Array1<f64>, f64, f64), RegressionError> {
    let k = params.len();
    let mut x = Array2::zeros((rows.len(), k));
    for (i, r) in rows.iter().enumerate() {
        let xhat = params.normalize(r)?;
        x.row_mut(i).assign(&Array1::from(xhat));
    }
    let tmin = targets.iter().copied().fold(f64::INFINITY, f64::min);
    let tmax = targets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = tmax - tmin;
    let y = targets.iter().map(|&t| if span > 0.0 { (t - tmin) / span } else { 0.0 }).collect();
    Ok((x, y, tmin, tmax))
}
