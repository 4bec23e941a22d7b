//! Lasso linear regression on normalized descriptors and its cross-validation harness.

mod cv;
mod lasso;
mod predictor;

pub use cv::{cross_validate, median, partition, r_squared, select_lambda, CvReport, FOLDS};
pub use lasso::{kkt_violation, lambda_max, lasso_fit, lasso_objective, LassoFit, LassoOptions};
pub use predictor::{standardized_problem, LinearPredictor};

use thiserror::Error;

use crate::descriptors::DescriptorError;

#[derive(Debug, Error)]
pub enum RegressionError {
    #[error("inputs contain NaN or infinite values")]
    NonFinite,
    #[error("penalty must be a finite non-negative number, got {0}")]
    Lambda(f64),
    #[error("{rows} rows but {targets} targets")]
    Shape { rows: usize, targets: usize },
    #[error("{names} descriptor names for {columns} columns")]
    Names { names: usize, columns: usize },
    #[error("not enough samples ({0})")]
    TooFew(usize),
    #[error("penalty grid is empty")]
    EmptyGrid,
    #[error("predictor was trained on descriptor space {expected}, got {found}")]
    SpaceMismatch { expected: String, found: String },
    #[error("predictor json: {0}")]
    Json(String),
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
}
