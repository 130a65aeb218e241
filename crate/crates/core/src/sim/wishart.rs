//! Extreme eigenvalues of sample covariance matrices of Gaussian data.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::experiment::quantile;
use super::generate::stream_rng;
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremeSummary {
    pub mean: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
}

impl ExtremeSummary {
    fn of(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self {
            mean: values.iter().sum::<f64>() / values.len() as f64,
            q05: quantile(&sorted, 0.05),
            q50: quantile(&sorted, 0.5),
            q95: quantile(&sorted, 0.95),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WishartSummary {
    pub m: usize,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub tau_lower: f64,
    pub tau_upper: f64,
    pub min_eigenvalue: ExtremeSummary,
    pub max_eigenvalue: ExtremeSummary,
    /// Share of replications with `τ_* ≤ λ_min ≤ λ_max ≤ τ^*`.
    pub freq_within: f64,
    /// `(1 − √(m/n))²`.
    pub center_lower: f64,
    /// `(1 + √(m/n))²`.
    pub center_upper: f64,
}

/// Extreme eigenvalues of `U'U/n` for `reps` draws of an `n × m` standard
/// Gaussian `U`. Replication `i` uses its own stream of `seed`.
pub fn wishart_extreme_trials(
    m: usize,
    n: usize,
    reps: usize,
    seed: u64,
    tau_lower: f64,
    tau_upper: f64,
) -> Result<WishartSummary> {
    if m == 0 || m > n {
        return Err(Error::Precondition(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    if reps == 0 {
        return Err(Error::Precondition("need at least one replication".into()));
    }
    let extremes: Vec<(f64, f64)> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let u = DMatrix::<f64>::from_fn(n, m, |_, _| StandardNormal.sample(&mut rng));
            let w = (u.transpose() * &u) / n as f64;
            linalg::sym_extremes(&w)
        })
        .collect();
    let lows: Vec<f64> = extremes.iter().map(|e| e.0).collect();
    let highs: Vec<f64> = extremes.iter().map(|e| e.1).collect();
    let within = extremes
        .iter()
        .filter(|(lo, hi)| tau_lower <= *lo && *hi <= tau_upper)
        .count();
    let ratio = (m as f64 / n as f64).sqrt();
    Ok(WishartSummary {
        m,
        n,
        reps,
        seed,
        tau_lower,
        tau_upper,
        min_eigenvalue: ExtremeSummary::of(&lows),
        max_eigenvalue: ExtremeSummary::of(&highs),
        freq_within: within as f64 / reps as f64,
        center_lower: (1.0 - ratio).powi(2),
        center_upper: (1.0 + ratio).powi(2),
    })
}
