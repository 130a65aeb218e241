//! Fixtures shared by the benchmarks.

use riesz_lasso::sim::{gen_coefficients, gen_gaussian_design, CovarianceSpec};
use riesz_lasso::DesignMatrix;

/// Standardized AR(1) design with a sparse noisy response.
pub fn regression_problem(n: usize, p: usize, q: usize, seed: u64) -> (DesignMatrix, Vec<f64>) {
    let x = gen_gaussian_design(n, p, &CovarianceSpec::Ar1 { rho: 0.3 }, seed)
        .and_then(|g| g.design.standardize_columns())
        .expect("valid benchmark design");
    let beta = gen_coefficients(p, q, 1.0, 0.0, 0, seed + 1).expect("valid coefficients");
    let noise = gen_gaussian_design(n, 1, &CovarianceSpec::Identity, seed + 2).expect("valid noise");
    let y = x
        .mul_vec(&beta)
        .iter()
        .zip(noise.design.matrix().iter())
        .map(|(m, e)| m + e)
        .collect();
    (x, y)
}
