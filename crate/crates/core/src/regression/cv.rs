use ndarray::{ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{lasso_fit, LassoOptions, RegressionError};

pub const FOLDS: usize = 5;

/// `1 - SS_res / SS_tot`, or 0 when the truth has no variance.
pub fn r_squared(pred: &[f64], truth: &[f64]) -> f64 {
    let n = truth.len() as f64;
    let mean = truth.iter().sum::<f64>() / n;
    let ss_tot: f64 = truth.iter().map(|t| (t - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return 0.0;
    }
    let ss_res: f64 = pred.iter().zip(truth).map(|(p, t)| (t - p).powi(2)).sum();
    1.0 - ss_res / ss_tot
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub lambda: f64,
    /// Test R² of every trial, execution-major.
    pub fold_r2: Vec<f64>,
    pub median_r2: f64,
    /// Mean number of nonzero weights over all trials.
    pub mean_selected: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Random split of `0..n` into [`FOLDS`] parts of near-equal size.
pub fn partition(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let mut parts = vec![Vec::new(); FOLDS];
    for (i, v) in idx.into_iter().enumerate() {
        parts[i % FOLDS].push(v);
    }
    parts
}

/// `executions` rounds of 5-fold cross-validation; round `e` partitions with a
/// generator seeded by `seed + e`.
pub fn cross_validate(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    lambda: f64,
    executions: usize,
    seed: u64,
    opts: &LassoOptions,
) -> Result<CvReport, RegressionError> {
    if x.nrows() < 2 * FOLDS {
        return Err(RegressionError::TooFew(x.nrows()));
    }
    let partitions: Vec<Vec<Vec<usize>>> = (0..executions)
        .map(|e| partition(x.nrows(), &mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(e as u64))))
        .collect();
    let tasks: Vec<(usize, usize)> = (0..executions).flat_map(|e| (0..FOLDS).map(move |k| (e, k))).collect();
    let results = tasks
        .par_iter()
        .map(|&(e, k)| {
            let test = &partitions[e][k];
            let train: Vec<usize> = (0..FOLDS).filter(|&j| j != k).flat_map(|j| partitions[e][j].iter().copied()).collect();
            let xt = x.select(Axis(0), &train);
            let yt = y.select(Axis(0), &train);
            let fit = lasso_fit(xt.view(), yt.view(), lambda, opts)?;
            let xs = x.select(Axis(0), test);
            let pred: Vec<f64> = xs.rows().into_iter().map(|r| r.dot(&ArrayView1::from(&fit.weights)) + fit.bias).collect();
            let truth: Vec<f64> = test.iter().map(|&i| y[i]).collect();
            Ok((r_squared(&pred, &truth), fit.weights.iter().filter(|&&w| w != 0.0).count()))
        })
        .collect::<Result<Vec<_>, RegressionError>>()?;
    let fold_r2: Vec<f64> = results.iter().map(|r| r.0).collect();
    let mean_selected = results.iter().map(|r| r.1 as f64).sum::<f64>() / results.len().max(1) as f64;
    Ok(CvReport { lambda, median_r2: median(&fold_r2), fold_r2, mean_selected })
}

/// Cross-validates every penalty in `grid` and returns the reports plus the index of
/// the best median R² (first one on ties).
pub fn select_lambda(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    grid: &[f64],
    executions: usize,
    seed: u64,
    opts: &LassoOptions,
) -> Result<(Vec<CvReport>, usize), RegressionError> {
    if grid.is_empty() {
        return Err(RegressionError::EmptyGrid);
    }
    let reports = grid
        .iter()
        .map(|&l| cross_validate(x, y, l, executions, seed, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let mut best = 0;
    for (i, r) in reports.iter().enumerate() {
        if r.median_r2 > reports[best].median_r2 {
            best = i;
        }
    }
    Ok((reports, best))
}
