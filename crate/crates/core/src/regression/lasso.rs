use ndarray::{Array1, ArrayView1, ArrayView2, Axis};

use super::RegressionError;

/// Stopping rule for coordinate descent.
#[derive(Debug, Clone, Copy)]
pub struct LassoOptions {
    /// Converged once the largest coordinate change of a sweep is below this.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Keep the objective after every sweep.
    pub trace: bool,
}

impl Default for LassoOptions {
    fn default() -> Self {
        LassoOptions { tol: 1e-7, max_sweeps: 100_000, trace: false }
    }
}

#[derive(Debug, Clone)]
pub struct LassoFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub sweeps: usize,
    pub converged: bool,
    /// Objective after each sweep when tracing, starting from w = 0.
    pub objective_trace: Vec<f64>,
}

fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

fn check_inputs(x: &ArrayView2<f64>, y: &ArrayView1<f64>, lambda: f64) -> Result<(), RegressionError> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(RegressionError::Lambda(lambda));
    }
    if x.nrows() != y.len() {
        return Err(RegressionError::Shape { rows: x.nrows(), targets: y.len() });
    }
    if x.nrows() < 2 {
        return Err(RegressionError::TooFew(x.nrows()));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(RegressionError::NonFinite);
    }
    Ok(())
}

/// `(1/(2N)) * ||y - X w - b||^2 + lambda * ||w||_1`.
pub fn lasso_objective(x: ArrayView2<f64>, y: ArrayView1<f64>, w: &[f64], b: f64, lambda: f64) -> f64 {
    let n = x.nrows() as f64;
    let r = &y - &x.dot(&ArrayView1::from(w)) - b;
    r.dot(&r) / (2.0 * n) + lambda * w.iter().map(|v| v.abs()).sum::<f64>()
}

/// Cyclic coordinate descent with soft-thresholding. The bias is unpenalized, so the
/// problem is solved on centered data and the bias recovered afterwards.
pub fn lasso_fit(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    lambda: f64,
    opts: &LassoOptions,
) -> Result<LassoFit, RegressionError> {
    check_inputs(&x, &y, lambda)?;
    let n = x.nrows() as f64;
    let k = x.ncols();
    let xmean = x.mean_axis(Axis(0)).unwrap();
    let ymean = y.mean().unwrap();
    let xc = &x - &xmean;
    let yc = &y - ymean;
    let sq: Vec<f64> = (0..k).map(|j| xc.column(j).dot(&xc.column(j)) / n).collect();

    let mut w = Array1::<f64>::zeros(k);
    let mut r = yc.clone();
    let objective = |r: &Array1<f64>, w: &Array1<f64>| r.dot(r) / (2.0 * n) + lambda * w.iter().map(|v| v.abs()).sum::<f64>();
    let mut trace = Vec::new();
    if opts.trace {
        trace.push(objective(&r, &w));
    }
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut max_step = 0.0f64;
        for j in 0..k {
            if sq[j] <= f64::EPSILON {
                continue;
            }
            let col = xc.column(j);
            let old = w[j];
            let rho = col.dot(&r) / n + sq[j] * old;
            let new = soft_threshold(rho, lambda) / sq[j];
            if new != old {
                r.scaled_add(old - new, &col);
                w[j] = new;
                max_step = max_step.max((new - old).abs());
            }
        }
        if opts.trace {
            trace.push(objective(&r, &w));
        }
        if max_step < opts.tol {
            converged = true;
            break;
        }
    }
    let bias = ymean - xmean.dot(&w);
    Ok(LassoFit { weights: w.to_vec(), bias, sweeps, converged, objective_trace: trace })
}

/// Smallest penalty at which every weight is zero.
pub fn lambda_max(x: ArrayView2<f64>, y: ArrayView1<f64>) -> f64 {
    let n = x.nrows() as f64;
    let ymean = y.mean().unwrap_or(0.0);
    let yc = &y - ymean;
    let xc = &x - &x.mean_axis(Axis(0)).unwrap();
    (0..x.ncols()).map(|j| (xc.column(j).dot(&yc) / n).abs()).fold(0.0, f64::max)
}

/// Largest violation of the optimality conditions: `|g_j| <= lambda` where `w_j = 0`
/// and `g_j = -sign(w_j) lambda` otherwise, with `g` the gradient of the smooth part,
/// plus the bias stationarity `mean(residual) = 0`.
pub fn kkt_violation(x: ArrayView2<f64>, y: ArrayView1<f64>, w: &[f64], b: f64, lambda: f64) -> f64 {
    let n = x.nrows() as f64;
    let r = &y - &x.dot(&ArrayView1::from(w)) - b;
    let mut worst = (r.sum() / n).abs();
    for (j, &wj) in w.iter().enumerate() {
        let g = -x.column(j).dot(&r) / n;
        let v = if wj == 0.0 { (g.abs() - lambda).max(0.0) } else { (g + wj.signum() * lambda).abs() };
        worst = worst.max(v);
    }
    worst
}
