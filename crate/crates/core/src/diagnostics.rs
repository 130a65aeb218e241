//! Selection-quality functionals that need the true coefficients.
//!
//! In simulation the true `β` is known, so the quality of a selected model
//! `Â` can be measured directly: its dimension `q̂`, the count `q̃` of indices
//! that are selected or large, the bias `B̃ = ‖(I − P̂)Xβ‖`, the norms `ζ_α`
//! of the large coefficients it misses, and the estimation losses.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bounds::{SparsityBudget, TheoryBounds};
use crate::design::DesignMatrix;
use crate::error::{Error, Result};
use crate::lasso::LassoSolution;

/// Default cap on the `2^k` subsets enumerated for `η₂`.
pub const DEFAULT_ETA2_BUDGET: u128 = 1 << 16;

/// Relative rank tolerance of the projection onto the selected columns.
pub const PROJECTION_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityProfile {
    /// Indices of the `p − q` smallest `|β_j|`, increasing.
    pub a0: Vec<usize>,
    pub q: usize,
    pub eta1: f64,
    pub eta2_lower: f64,
    pub eta2_upper: f64,
    pub eta2_exact: bool,
}

impl SparsityProfile {
    /// The budget the bounds consume; `η₂` is its upper bracket.
    pub fn budget(&self) -> SparsityBudget {
        SparsityBudget {
            q: self.q,
            eta1: self.eta1,
            eta2: self.eta2_upper,
            eta2_is_bound: !self.eta2_exact,
        }
    }

    /// Indices outside `A0` (the large coefficients), increasing.
    pub fn large(&self, p: usize) -> Vec<usize> {
        let mut in_a0 = vec![false; p];
        for &j in &self.a0 {
            in_a0[j] = true;
        }
        (0..p).filter(|&j| !in_a0[j]).collect()
    }
}

/// Splits `β` into `q` large and `p − q` small coefficients and measures the
/// small part: `η₁ = Σ_{A0} |β_j|` and `η₂ = max_{A ⊆ A0} ‖Σ_{j∈A} β_j x_j‖`.
///
/// Ties in `|β_j|` send larger indices to `A0`. `η₂` is enumerated over the
/// nonzero small coefficients when `2^k ≤ eta2_budget`; otherwise it is
/// bracketed below by greedy subset growth and above by
/// `min(Σ_{A0} |β_j| ‖x_j‖, max_j ‖x_j‖ η₁)`.
pub fn sparsity_profile(x: &DesignMatrix, beta: &[f64], q: usize, eta2_budget: u128) -> Result<SparsityProfile> {
    let p = x.p();
    if beta.len() != p {
        return Err(Error::Dimension(format!("beta has {} entries, p = {p}", beta.len())));
    }
    if q > p {
        return Err(Error::Index(format!("q = {q} exceeds p = {p}")));
    }
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| beta[b].abs().total_cmp(&beta[a].abs()).then(a.cmp(&b)));
    let mut a0 = order[q..].to_vec();
    a0.sort_unstable();
    let eta1: f64 = a0.iter().map(|&j| beta[j].abs()).sum();

    let nonzero: Vec<usize> = a0.iter().copied().filter(|&j| beta[j] != 0.0).collect();
    let k = nonzero.len();
    let (eta2_lower, eta2_upper, eta2_exact) = if k == 0 {
        (0.0, 0.0, true)
    } else if k < 127 && (1u128 << k) <= eta2_budget {
        let v = max_subset_effect(x, beta, &nonzero);
        (v, v, true)
    } else {
        let lower = greedy_subset_effect(x, beta, &nonzero);
        let col_norms: Vec<f64> = x.column_norms_sq().into_iter().map(f64::sqrt).collect();
        let max_norm = col_norms.iter().copied().fold(0.0, f64::max);
        let triangle: f64 = nonzero.iter().map(|&j| beta[j].abs() * col_norms[j]).sum();
        (lower, triangle.min(max_norm * eta1).max(lower), false)
    };
    Ok(SparsityProfile {
        a0,
        q,
        eta1,
        eta2_lower,
        eta2_upper,
        eta2_exact,
    })
}

// Gray-code walk over all subsets: one column add or remove per step.
fn max_subset_effect(x: &DesignMatrix, beta: &[f64], idx: &[usize]) -> f64 {
    let mut v = DVector::<f64>::zeros(x.n());
    let mut member = vec![false; idx.len()];
    let mut best = 0.0f64;
    for step in 1u64..(1u64 << idx.len()) {
        let bit = step.trailing_zeros() as usize;
        let j = idx[bit];
        let sign = if member[bit] { -1.0 } else { 1.0 };
        member[bit] = !member[bit];
        v.axpy(sign * beta[j], &x.column(j), 1.0);
        best = best.max(v.norm_squared());
    }
    best.sqrt()
}

fn greedy_subset_effect(x: &DesignMatrix, beta: &[f64], idx: &[usize]) -> f64 {
    let mut v = DVector::<f64>::zeros(x.n());
    let mut used = vec![false; idx.len()];
    let mut best = 0.0f64;
    loop {
        let mut pick: Option<(usize, f64)> = None;
        for (t, &j) in idx.iter().enumerate() {
            if used[t] {
                continue;
            }
            let cand = (&v + beta[j] * x.column(j)).norm_squared();
            if cand > pick.map_or(best, |(_, b)| b) {
                pick = Some((t, cand));
            }
        }
        match pick {
            Some((t, value)) => {
                used[t] = true;
                v.axpy(beta[idx[t]], &x.column(idx[t]), 1.0);
                best = value;
            }
            None => break,
        }
    }
    let all = x.mul_vec(&restrict(beta, idx)).norm_squared();
    best.max(all).sqrt()
}

fn restrict(beta: &[f64], idx: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; beta.len()];
    for &j in idx {
        out[j] = beta[j];
    }
    out
}

/// `B̃ = ‖(I − P̂) Xβ‖`, with `P̂` the projection onto `span{x_j : j ∈ Â}`.
pub fn selected_model_bias(x: &DesignMatrix, beta: &[f64], a_hat: &[usize]) -> Result<f64> {
    if beta.len() != x.p() {
        return Err(Error::Dimension(format!("beta has {} entries, p = {}", beta.len(), x.p())));
    }
    let mean = x.mul_vec(beta);
    if a_hat.is_empty() {
        return Ok(mean.norm());
    }
    let idx = x.checked_indices(a_hat)?;
    let xa = DMatrix::from_fn(x.n(), idx.len(), |i, t| x.matrix()[(i, idx[t])]);
    Ok(projection_residual(xa, &mean).norm())
}

fn projection_residual(xa: DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    let svd = xa.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let mut residual = v.clone();
    if smax == 0.0 {
        return residual;
    }
    for (t, &s) in svd.singular_values.iter().enumerate() {
        if s > PROJECTION_RANK_TOL * smax {
            let ut = u.column(t);
            let coef = ut.dot(v);
            residual.axpy(-coef, &ut, 1.0);
        }
    }
    residual
}

/// Exponent of a missing-coefficient norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    /// Count of missing large coefficients.
    Zero,
    Finite(f64),
    /// Largest missing magnitude.
    Infinity,
}

impl Exponent {
    pub const STANDARD: [Exponent; 4] = [
        Exponent::Zero,
        Exponent::Finite(1.0),
        Exponent::Finite(2.0),
        Exponent::Infinity,
    ];

    pub fn key(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Zero => f.write_str("0"),
            Exponent::Finite(a) => write!(f, "{a}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

/// `ζ_α` keyed by exponent (`"0"`, `"1"`, `"2"`, `"inf"`, ...).
pub type ZetaMap = BTreeMap<String, f64>;

/// `ζ_α = (Σ_{j ∉ A0, j ∉ Â} |β_j|^α)^{1/α}`; empty sums give 0.
pub fn missing_coefficients(beta: &[f64], a0: &[usize], a_hat: &[usize], alphas: &[Exponent]) -> ZetaMap {
    let p = beta.len();
    let mut skip = vec![false; p];
    for &j in a0.iter().chain(a_hat) {
        if j < p {
            skip[j] = true;
        }
    }
    let missing: Vec<f64> = (0..p).filter(|&j| !skip[j]).map(|j| beta[j].abs()).collect();
    alphas
        .iter()
        .map(|alpha| {
            let value = match *alpha {
                Exponent::Zero => missing.len() as f64,
                Exponent::Infinity => missing.iter().copied().fold(0.0, f64::max),
                Exponent::Finite(a) => {
                    if missing.is_empty() {
                        0.0
                    } else {
                        missing.iter().map(|v| v.powf(a)).sum::<f64>().powf(1.0 / a)
                    }
                }
            };
            (alpha.key(), value)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    /// `q̃ ≤ M₁* q`.
    pub q_tilde: bool,
    /// `B̃² ≤ M₂* q λ² / (c^* n)`.
    pub bias: bool,
    /// `ζ₂² ≤ M₃* q λ² / (c^* c_* n²)`.
    pub zeta2: bool,
    /// Every `j` with `β_j²` above the selection threshold is selected.
    pub theorem2: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Losses {
    /// `‖X(β̂ − β)‖`.
    pub prediction: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl Losses {
    pub fn compute(x: &DesignMatrix, beta: &[f64], beta_hat: &[f64]) -> Self {
        let diff: Vec<f64> = beta_hat.iter().zip(beta).map(|(a, b)| a - b).collect();
        Self {
            prediction: x.mul_vec(&diff).norm(),
            l1: diff.iter().map(|d| d.abs()).sum(),
            l2: diff.iter().map(|d| d * d).sum::<f64>().sqrt(),
            linf: diff.iter().fold(0.0, |m, d| m.max(d.abs())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionDiagnostics {
    pub q_hat: usize,
    pub q_tilde: usize,
    pub bias: f64,
    pub zeta: ZetaMap,
    /// `A0ᶜ ⊆ Â`.
    pub support_recovered: bool,
    pub verdicts: Verdicts,
    pub losses: Losses,
}

/// Measures a LASSO selection against the truth and checks each bound.
pub fn theorem_verdicts(
    x: &DesignMatrix,
    beta: &[f64],
    profile: &SparsityProfile,
    solution: &LassoSolution,
    bounds: &TheoryBounds,
) -> Result<SelectionDiagnostics> {
    let p = x.p();
    if beta.len() != p || solution.beta_hat.len() != p {
        return Err(Error::Dimension("beta, beta_hat and design disagree on p".into()));
    }
    let mut selected = vec![false; p];
    for &j in &solution.selected {
        selected[j] = true;
    }
    let large = profile.large(p);
    let missed_large = large.iter().filter(|&&j| !selected[j]).count();
    let q_tilde = solution.q_hat + missed_large;
    let bias = selected_model_bias(x, beta, &solution.selected)?;
    let zeta = missing_coefficients(beta, &profile.a0, &solution.selected, &Exponent::STANDARD);
    let zeta2 = zeta["2"];

    let verdicts = Verdicts {
        q_tilde: q_tilde as f64 <= bounds.q_hat_bound,
        bias: bias * bias <= bounds.bias_bound,
        zeta2: zeta2 * zeta2 <= bounds.zeta2_bound,
        theorem2: (0..p).all(|j| selected[j] || beta[j] * beta[j] <= bounds.theorem2_threshold),
    };
    Ok(SelectionDiagnostics {
        q_hat: solution.q_hat,
        q_tilde,
        bias,
        zeta,
        support_recovered: missed_large == 0,
        verdicts,
        losses: Losses::compute(x, beta, &solution.beta_hat),
    })
}
