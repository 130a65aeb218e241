//! LASSO by cyclic coordinate descent, certified through the KKT conditions.
//!
//! The objective is `‖y − Xb‖²/2 + λ‖b‖₁`: the penalty multiplies the ℓ₁
//! norm directly and the loss carries no `1/n` factor. A point `b` is optimal
//! iff `x_j'(y − Xb) = sgn(b_j) λ` for `b_j ≠ 0` and `|x_j'(y − Xb)| ≤ λ`
//! for `b_j = 0`; the solver stops on exactly that criterion.

use std::fmt::Write as _;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::design::DesignMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_SWEEPS: usize = 100_000;
/// Coefficients below this after thresholding are stored as exact zeros.
pub const ZERO_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    /// `max_{b_j ≠ 0} |x_j'(y − Xb) − sgn(b_j) λ|`.
    pub active_residual: f64,
    /// `max_{b_j = 0} (|x_j'(y − Xb)| − λ)⁺`.
    pub inactive_excess: f64,
    pub satisfied: bool,
    /// Some zero coefficient sits on the boundary `|x_j'(y − Xb)| ≈ λ`, so
    /// the minimizer may be non-unique or about to change support.
    pub near_degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoSolution {
    pub lambda: f64,
    pub beta_hat: Vec<f64>,
    /// Indices `j` with `beta_hat[j] ≠ 0`, increasing.
    pub selected: Vec<usize>,
    pub q_hat: usize,
    pub kkt: KktReport,
}

impl LassoSolution {
    fn new(lambda: f64, beta_hat: Vec<f64>, kkt: KktReport) -> Self {
        let selected: Vec<usize> = beta_hat
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, _)| j)
            .collect();
        Self {
            lambda,
            q_hat: selected.len(),
            selected,
            beta_hat,
            kkt,
        }
    }
}

/// `‖y − Xb‖²/2 + λ‖b‖₁`.
pub fn objective(x: &DesignMatrix, y: &[f64], beta: &[f64], lambda: f64) -> f64 {
    let fit = x.mul_vec(beta);
    let rss: f64 = y.iter().zip(fit.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    0.5 * rss + lambda * beta.iter().map(|b| b.abs()).sum::<f64>()
}

/// `‖X'y‖_∞`, the smallest penalty with an all-zero solution.
pub fn lambda_max(x: &DesignMatrix, y: &[f64]) -> f64 {
    x.tr_mul_vec(&DVector::from_column_slice(y)).amax()
}

fn check_dims(x: &DesignMatrix, y: &[f64], beta: Option<&[f64]>) -> Result<()> {
    if y.len() != x.n() {
        return Err(Error::Dimension(format!(
            "response has {} entries, design has {} rows",
            y.len(),
            x.n()
        )));
    }
    if let Some(b) = beta {
        if b.len() != x.p() {
            return Err(Error::Dimension(format!(
                "coefficient vector has {} entries, design has {} columns",
                b.len(),
                x.p()
            )));
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("response contains non-finite values".into()));
    }
    Ok(())
}

/// Evaluates the KKT residuals of `beta` at penalty `lambda`.
pub fn kkt_report(x: &DesignMatrix, y: &[f64], beta: &[f64], lambda: f64, tol: f64) -> Result<KktReport> {
    check_dims(x, y, Some(beta))?;
    let residual = DVector::from_column_slice(y) - x.mul_vec(beta);
    Ok(kkt_from_gradient(&x.tr_mul_vec(&residual), beta, lambda, tol))
}

fn kkt_from_gradient(grad: &DVector<f64>, beta: &[f64], lambda: f64, tol: f64) -> KktReport {
    let mut active_residual = 0.0f64;
    let mut inactive_excess = 0.0f64;
    let mut near_degenerate = false;
    let slack = tol * lambda.max(1.0);
    for (g, &b) in grad.iter().zip(beta) {
        if b != 0.0 {
            active_residual = active_residual.max((g - b.signum() * lambda).abs());
        } else {
            inactive_excess = inactive_excess.max(g.abs() - lambda);
            if lambda > 0.0 && g.abs() >= lambda - slack {
                near_degenerate = true;
            }
        }
    }
    KktReport {
        active_residual,
        inactive_excess,
        satisfied: active_residual <= slack && inactive_excess <= slack,
        near_degenerate,
    }
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Solves the LASSO at `lambda` from a zero start.
pub fn solve_lasso(x: &DesignMatrix, y: &[f64], lambda: f64, tol: f64, max_sweeps: usize) -> Result<LassoSolution> {
    CoordinateDescent::new(x, y, lambda, tol, max_sweeps)?.run(None, None)
}

/// Solves the LASSO at `lambda` starting from `init`.
pub fn solve_lasso_warm(
    x: &DesignMatrix,
    y: &[f64],
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
    init: &[f64],
) -> Result<LassoSolution> {
    CoordinateDescent::new(x, y, lambda, tol, max_sweeps)?.run(Some(init), None)
}

/// Like [`solve_lasso`], also returning the objective after every sweep.
pub fn solve_lasso_traced(
    x: &DesignMatrix,
    y: &[f64],
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
) -> Result<(LassoSolution, Vec<f64>)> {
    let mut trace = Vec::new();
    let sol = CoordinateDescent::new(x, y, lambda, tol, max_sweeps)?.run(None, Some(&mut trace))?;
    Ok((sol, trace))
}

/// Warm-started solutions along a strictly decreasing penalty grid.
pub fn solve_path(
    x: &DesignMatrix,
    y: &[f64],
    lambdas: &[f64],
    tol: f64,
    max_sweeps: usize,
) -> Result<Vec<LassoSolution>> {
    if lambdas.iter().any(|l| !(*l >= 0.0)) {
        return Err(Error::Precondition("penalties must be non-negative".into()));
    }
    if lambdas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Precondition("penalty grid must be strictly decreasing".into()));
    }
    let mut out: Vec<LassoSolution> = Vec::with_capacity(lambdas.len());
    for (index, &lambda) in lambdas.iter().enumerate() {
        let init = out.last().map(|s| s.beta_hat.as_slice());
        let solver = CoordinateDescent::new(x, y, lambda, tol, max_sweeps)?;
        let sol = solver.run(init, None).map_err(|e| Error::Path {
            index,
            source: Box::new(e),
        })?;
        out.push(sol);
    }
    Ok(out)
}

/// `lambda,q_hat` rows with a header, one per solution.
pub fn path_csv(path: &[LassoSolution]) -> String {
    let mut s = String::from("lambda,q_hat\n");
    for sol in path {
        let _ = writeln!(s, "{},{}", sol.lambda, sol.q_hat);
    }
    s
}

struct CoordinateDescent<'a> {
    x: &'a DesignMatrix,
    y: &'a [f64],
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
    norms_sq: Vec<f64>,
}

impl<'a> CoordinateDescent<'a> {
    fn new(x: &'a DesignMatrix, y: &'a [f64], lambda: f64, tol: f64, max_sweeps: usize) -> Result<Self> {
        check_dims(x, y, None)?;
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Precondition(format!("penalty must be finite and >= 0, got {lambda}")));
        }
        if !(tol > 0.0) {
            return Err(Error::Precondition(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self {
            x,
            y,
            lambda,
            tol,
            max_sweeps,
            norms_sq: x.column_norms_sq(),
        })
    }

    fn residual(&self, beta: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(self.y) - self.x.mul_vec(beta)
    }

    /// One coordinate update; returns the change in `b_j` scaled by `‖x_j‖²`.
    fn update(&self, j: usize, beta: &mut [f64], r: &mut DVector<f64>) -> f64 {
        let norm_sq = self.norms_sq[j];
        if norm_sq == 0.0 {
            return 0.0;
        }
        let col = self.x.column(j);
        let z = col.dot(r) + norm_sq * beta[j];
        let mut new = soft_threshold(z, self.lambda) / norm_sq;
        if new.abs() < ZERO_THRESHOLD {
            new = 0.0;
        }
        let delta = new - beta[j];
        if delta != 0.0 {
            r.axpy(-delta, &col, 1.0);
            beta[j] = new;
        }
        delta.abs() * norm_sq
    }

    fn run(&self, init: Option<&[f64]>, mut trace: Option<&mut Vec<f64>>) -> Result<LassoSolution> {
        let p = self.x.p();
        let mut beta = match init {
            Some(b) if b.len() == p => b.to_vec(),
            Some(b) => {
                return Err(Error::Dimension(format!(
                    "initial point has {} entries, expected {p}",
                    b.len()
                )))
            }
            None => vec![0.0; p],
        };
        let inner_tol = 0.1 * self.tol * self.lambda.max(1.0);
        let mut r = self.residual(&beta);
        let mut sweeps = 0usize;
        let mut record = |beta: &[f64], r: &DVector<f64>| {
            if let Some(t) = trace.as_deref_mut() {
                t.push(0.5 * r.norm_squared() + self.lambda * beta.iter().map(|b| b.abs()).sum::<f64>());
            }
        };
        record(&beta, &r);

        loop {
            r = self.residual(&beta);
            let kkt = kkt_from_gradient(&self.x.tr_mul_vec(&r), &beta, self.lambda, self.tol);
            if kkt.satisfied {
                return Ok(LassoSolution::new(self.lambda, beta, kkt));
            }
            if sweeps >= self.max_sweeps {
                return Err(Error::NonConvergence {
                    sweeps,
                    best: Box::new(LassoSolution::new(self.lambda, beta, kkt)),
                });
            }

            for j in 0..p {
                self.update(j, &mut beta, &mut r);
            }
            sweeps += 1;
            record(&beta, &r);

            let active: Vec<usize> = (0..p).filter(|&j| beta[j] != 0.0).collect();
            while !active.is_empty() && sweeps < self.max_sweeps {
                let mut change = 0.0f64;
                for &j in &active {
                    change = change.max(self.update(j, &mut beta, &mut r));
                }
                sweeps += 1;
                record(&beta, &r);
                if change <= inner_tol {
                    break;
                }
            }
        }
    }
}
