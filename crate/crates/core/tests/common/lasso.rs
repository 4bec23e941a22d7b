//! Independent reference solutions for Lasso problems.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Gaussian design with `n` rows and `k` columns, targets `X w* + b* + noise`.
pub fn synthetic<R: Rng>(rng: &mut R, n: usize, k: usize, noise: f64) -> (Array2<f64>, Array1<f64>, Vec<f64>, f64) {
    let x = Array2::from_shape_fn((n, k), |_| StandardNormal.sample(rng));
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let b = rng.gen_range(-1.0..1.0);
    let y = Array1::from_shape_fn(n, |i| {
        let e: f64 = StandardNormal.sample(rng);
        (0..k).map(|j| x[[i, j]] * w[j]).sum::<f64>() + b + noise * e
    });
    (x, y, w, b)
}

/// Least squares with intercept from the normal equations.
pub fn normal_equations(x: &Array2<f64>, y: &Array1<f64>) -> (Vec<f64>, f64) {
    let (n, k) = x.dim();
    let a = DMatrix::from_fn(n, k + 1, |i, j| if j < k { x[[i, j]] } else { 1.0 });
    let yv = DVector::from_iterator(n, y.iter().copied());
    let ata = a.transpose() * &a;
    let aty = a.transpose() * yv;
    let beta = ata.cholesky().expect("full column rank").solve(&aty);
    (beta.iter().take(k).copied().collect(), beta[k])
}

/// Accelerated proximal gradient on the uncentered problem with the bias as an
/// unpenalized coordinate.
pub fn proximal_gradient(x: &Array2<f64>, y: &Array1<f64>, lambda: f64) -> (Vec<f64>, f64) {
    let (n, k) = x.dim();
    let nf = n as f64;
    let a = DMatrix::from_fn(n, k + 1, |i, j| if j < k { x[[i, j]] } else { 1.0 });
    let yv = DVector::from_iterator(n, y.iter().copied());
    let hess = a.transpose() * &a / nf;
    let lip = hess.symmetric_eigenvalues().max();
    let step = 1.0 / lip;
    let mut beta = DVector::zeros(k + 1);
    let mut z = beta.clone();
    let mut t = 1.0f64;
    for _ in 0..200_000 {
        let grad = a.transpose() * (&a * &z - &yv) / nf;
        let mut next = &z - grad * step;
        for j in 0..k {
            let v = next[j];
            next[j] = v.signum() * (v.abs() - step * lambda).max(0.0);
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let moved = (&next - &beta).amax();
        z = &next + (&next - &beta) * ((t - 1.0) / t_next);
        beta = next;
        t = t_next;
        if moved < 1e-13 {
            break;
        }
    }
    (beta.iter().take(k).copied().collect(), beta[k])
}
