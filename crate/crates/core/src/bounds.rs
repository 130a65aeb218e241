//! Explicit constants and thresholds of the selection bounds.
//!
//! Given a sparsity budget `(q, η₁, η₂)`, spectrum bounds `c_* ≤ c^*` and a
//! penalty `λ`, everything here is closed-form arithmetic: the scale-free
//! ratios `r₁, r₂, C`, the constants `M₁*, M₂*, M₃*`, the penalty floors `λ*`
//! and `λ_{n,p}`, the selection threshold and the probability lower bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::serde_util::{f64_inf, opt_f64_inf};

/// `q` large coefficients; the rest have ℓ₁ mass `eta1` and maximal subset
/// mean effect `eta2` (an upper bound when `eta2_is_bound`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparsityBudget {
    pub q: usize,
    pub eta1: f64,
    pub eta2: f64,
    pub eta2_is_bound: bool,
}

impl SparsityBudget {
    pub fn new(q: usize, eta1: f64, eta2: f64) -> Result<Self> {
        if !(eta1 >= 0.0 && eta2 >= 0.0) {
            return Err(Error::Precondition(format!(
                "eta1 and eta2 must be non-negative, got {eta1} and {eta2}"
            )));
        }
        Ok(Self {
            q,
            eta1,
            eta2,
            eta2_is_bound: false,
        })
    }

    /// `q` large coefficients and nothing else.
    pub fn hard(q: usize) -> Self {
        Self {
            q,
            eta1: 0.0,
            eta2: 0.0,
            eta2_is_bound: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    pub r1: f64,
    pub r2: f64,
    /// `c^* / c_*`.
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MStar {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

fn check_spectrum(c_lower: f64, c_upper: f64) -> Result<()> {
    if !(c_lower > 0.0 && c_upper >= c_lower && c_upper.is_finite()) {
        return Err(Error::Precondition(format!(
            "spectrum bounds must satisfy 0 < c_lower <= c_upper < inf, got ({c_lower}, {c_upper})"
        )));
    }
    Ok(())
}

/// `r₁ = √(c^*η₁n/(qλ))`, `r₂ = √(c^*η₂²n/(qλ²))`, `C = c^*/c_*`.
pub fn invariant_ratios(
    budget: &SparsityBudget,
    c_lower: f64,
    c_upper: f64,
    lambda: f64,
    n: usize,
) -> Result<Ratios> {
    if budget.q == 0 {
        return Err(Error::Precondition(
            "ratios are undefined for q = 0; use theorem_bounds".into(),
        ));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("penalty must be positive, got {lambda}")));
    }
    check_spectrum(c_lower, c_upper)?;
    let q = budget.q as f64;
    let n = n as f64;
    Ok(Ratios {
        r1: (c_upper * budget.eta1 * n / (q * lambda)).sqrt(),
        r2: (c_upper * budget.eta2 * budget.eta2 * n / (q * lambda * lambda)).sqrt(),
        c: c_upper / c_lower,
    })
}

pub fn m_star_constants(r1: f64, r2: f64, c: f64) -> MStar {
    let sc = c.sqrt();
    let r1sq = r1 * r1;
    MStar {
        m1: 2.0 + 4.0 * r1sq + 4.0 * sc * r2 + 4.0 * c,
        m2: 8.0 / 3.0
            * (0.25 + r1sq + r2 * (2.0 * c).sqrt() * (1.0 + sc) + c * (0.5 + 4.0 * c / 3.0)),
        m3: 8.0 / 3.0
            * (0.25
                + r1sq
                + r2 * sc * (1.0 + 2.0 * (1.0 + c).sqrt())
                + 0.75 * r2 * r2
                + c * (7.0 / 6.0 + 2.0 * c / 3.0)),
    }
}

/// Smallest `λ` with `M₁*(λ) q + 1 ≤ q*`, or `∞` when none exists.
///
/// `M₁*(λ) q = a q + b/λ` with `a = 2 + 4C` and
/// `b = 4c^*η₁n + 4√C √(c^*nq) η₂`, so the infimum is `b / (q* − 1 − a q)`.
pub fn lambda_star(
    budget: &SparsityBudget,
    c_lower: f64,
    c_upper: f64,
    q_star: usize,
    n: usize,
) -> Result<f64> {
    check_spectrum(c_lower, c_upper)?;
    let c = c_upper / c_lower;
    let q = budget.q as f64;
    let n = n as f64;
    let a = 2.0 + 4.0 * c;
    let b = 4.0 * c_upper * budget.eta1 * n + 4.0 * c.sqrt() * (c_upper * n * q).sqrt() * budget.eta2;
    let room = q_star as f64 - 1.0 - a * q;
    Ok(if b == 0.0 {
        if room >= 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else if room > 0.0 {
        b / room
    } else {
        f64::INFINITY
    })
}

/// `p / (p ∨ a_n)^{1+c₀}`, which should be close to zero.
pub fn noise_tail_ratio(p: usize, a_n: f64, c0: f64) -> f64 {
    let base = (p as f64).max(a_n);
    p as f64 / base.powf(1.0 + c0)
}

/// Above this, [`lambda_np`] logs that `p / (p ∨ a_n)^{1+c₀}` is not small.
pub const TAIL_RATIO_WARNING: f64 = 0.1;

/// `λ_{n,p} = 2σ √(2(1+c₀) c^* n log(p ∨ a_n))`.
pub fn lambda_np(sigma: f64, c0: f64, a_n: f64, c_upper: f64, n: usize, p: usize) -> Result<f64> {
    let lambda = lambda_np_quiet(sigma, c0, a_n, c_upper, n, p)?;
    let tail = noise_tail_ratio(p, a_n, c0);
    if tail > TAIL_RATIO_WARNING {
        log::warn!("p / (p ∨ a_n)^(1+c0) = {tail:.3} is not small; the penalty floor is optimistic");
    }
    Ok(lambda)
}

/// [`lambda_np`] without the tail-ratio warning.
pub(crate) fn lambda_np_quiet(sigma: f64, c0: f64, a_n: f64, c_upper: f64, n: usize, p: usize) -> Result<f64> {
    if !(sigma > 0.0) || !(c0 >= 0.0) || !(a_n >= 0.0) || p == 0 || !(c_upper > 0.0) {
        return Err(Error::Precondition(format!(
            "lambda_np needs sigma > 0, c0 >= 0, a_n >= 0, c_upper > 0, p >= 1 \
             (got sigma={sigma}, c0={c0}, a_n={a_n}, c_upper={c_upper}, p={p})"
        )));
    }
    let base = (p as f64).max(a_n);
    if base <= 1.0 {
        return Err(Error::Domain(format!("log(p ∨ a_n) requires p ∨ a_n > 1, got {base}")));
    }
    Ok(2.0 * sigma * (2.0 * (1.0 + c0) * c_upper * n as f64 * base.ln()).sqrt())
}

/// Lower bound `2 − exp(2p/(p∨a_n)^{1+c₀}) − 2/(p∨a_n)^{1+c₀}` on the
/// probability of the event where the selection bounds hold, clipped to
/// `[0, 1]`.
pub fn success_probability(p: usize, a_n: f64, c0: f64) -> f64 {
    let denom = (p as f64).max(a_n).powf(1.0 + c0);
    let v = 2.0 - (2.0 * p as f64 / denom).exp() - 2.0 / denom;
    v.clamp(0.0, 1.0)
}

/// Upper bound on the failure probability of the estimation-rate event:
/// `e^{2/p^{c₀}} − 1 + 2/p^{1+c₀} + (1/p² + log p/(p²/4))^{(q+1)/2}`.
pub fn theorem3_failure_bound(p: usize, q: usize, c0: f64) -> f64 {
    let pf = p as f64;
    (2.0 / pf.powf(c0)).exp() - 1.0
        + 2.0 / pf.powf(1.0 + c0)
        + (1.0 / (pf * pf) + pf.ln() / (pf * pf / 4.0)).powf((q as f64 + 1.0) / 2.0)
}

/// Constants of the Gaussian-design sparse eigenvalue bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prop2Epsilons {
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps4: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prop2Bound {
    /// Lower bound on `P{τ_* ρ_* ≤ c_*(m) ≤ c^*(m) ≤ τ^* ρ^*}`.
    pub probability: f64,
    /// `(1 − ε₁ − ε₂)²`.
    pub tau_lower: f64,
    /// `(1 + ε₁ + ε₂)²`.
    pub tau_upper: f64,
    pub log_binomial: f64,
}

/// `1 − 2e^{−nε₄}` with `τ_*, τ^*`, after checking every applicability
/// condition of the Gaussian-design bound.
pub fn prop2_probability(eps: Prop2Epsilons, m: usize, n: usize, p: usize) -> Result<Prop2Bound> {
    let Prop2Epsilons { eps1, eps2, eps3, eps4 } = eps;
    for (name, v) in [("eps1", eps1), ("eps2", eps2), ("eps3", eps3), ("eps4", eps4)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Precondition(format!("{name} = {v} is not in (0, 1)")));
        }
    }
    if m == 0 || m > p || m as f64 > eps1 * eps1 * n as f64 {
        return Err(Error::Precondition(format!(
            "m = {m} must satisfy 1 <= m <= min(p, eps1^2 n) = min({p}, {})",
            eps1 * eps1 * n as f64
        )));
    }
    if eps1 + eps2 >= 1.0 {
        return Err(Error::Precondition(format!("eps1 + eps2 = {} is not below 1", eps1 + eps2)));
    }
    if (eps3 + eps4 - eps2 * eps2 / 2.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "eps3 + eps4 = {} must equal eps2^2 / 2 = {}",
            eps3 + eps4,
            eps2 * eps2 / 2.0
        )));
    }
    let log_binomial = linalg::ln_binomial(p, m);
    if log_binomial > eps3 * n as f64 {
        return Err(Error::Precondition(format!(
            "log binomial(p, m) = {log_binomial:.4} exceeds eps3 n = {}",
            eps3 * n as f64
        )));
    }
    Ok(Prop2Bound {
        probability: (1.0 - 2.0 * (-(n as f64) * eps4).exp()).clamp(0.0, 1.0),
        tau_lower: (1.0 - eps1 - eps2).powi(2),
        tau_upper: (1.0 + eps1 + eps2).powi(2),
        log_binomial,
    })
}

/// Noise and dimension parameters feeding `λ_{n,p}` and the probability bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma: f64,
    pub c0: f64,
    pub a_n: f64,
    pub p: usize,
}

/// Every explicit bound at one penalty level.
///
/// `bias_bound` bounds `B̃²` and `zeta2_bound` bounds `ζ₂²`. For `q = 0` the
/// ratios and `M` constants are absent and the bounds take their `q → 0`
/// limits; `theorem2_threshold` is then infinite since there is no large
/// coefficient to claim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryBounds {
    pub lambda: f64,
    pub n: usize,
    pub q: usize,
    pub eta1: f64,
    pub eta2: f64,
    pub c_lower: f64,
    pub c_upper: f64,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    #[serde(rename = "C")]
    pub c: f64,
    pub m1_star: Option<f64>,
    pub m2_star: Option<f64>,
    pub m3_star: Option<f64>,
    pub q_hat_bound: f64,
    pub bias_bound: f64,
    pub zeta2_bound: f64,
    #[serde(with = "f64_inf")]
    pub theorem2_threshold: f64,
    pub q_star: Option<usize>,
    #[serde(with = "opt_f64_inf", default)]
    pub lambda_star: Option<f64>,
    pub lambda_np: Option<f64>,
    pub success_prob: Option<f64>,
}

/// Assembles the sparsity, bias and missing-coefficient bounds at `lambda`.
pub fn theorem_bounds(
    budget: &SparsityBudget,
    c_lower: f64,
    c_upper: f64,
    lambda: f64,
    n: usize,
) -> Result<TheoryBounds> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("penalty must be positive, got {lambda}")));
    }
    check_spectrum(c_lower, c_upper)?;
    let c = c_upper / c_lower;
    let nf = n as f64;
    let mut out = TheoryBounds {
        lambda,
        n,
        q: budget.q,
        eta1: budget.eta1,
        eta2: budget.eta2,
        c_lower,
        c_upper,
        r1: None,
        r2: None,
        c,
        m1_star: None,
        m2_star: None,
        m3_star: None,
        q_hat_bound: 0.0,
        bias_bound: 0.0,
        zeta2_bound: 0.0,
        theorem2_threshold: f64::INFINITY,
        q_star: None,
        lambda_star: None,
        lambda_np: None,
        success_prob: None,
    };
    if budget.q == 0 {
        out.q_hat_bound = 4.0 * c_upper * budget.eta1 * nf / lambda;
        out.bias_bound = 8.0 / 3.0 * budget.eta1 * lambda;
        return Ok(out);
    }
    let ratios = invariant_ratios(budget, c_lower, c_upper, lambda, n)?;
    let m = m_star_constants(ratios.r1, ratios.r2, ratios.c);
    let q = budget.q as f64;
    let zeta_scale = q * lambda * lambda / (c_upper * c_lower * nf * nf);
    out.r1 = Some(ratios.r1);
    out.r2 = Some(ratios.r2);
    out.m1_star = Some(m.m1);
    out.m2_star = Some(m.m2);
    out.m3_star = Some(m.m3);
    out.q_hat_bound = m.m1 * q;
    out.bias_bound = m.m2 * q * lambda * lambda / (c_upper * nf);
    out.zeta2_bound = m.m3 * zeta_scale;
    out.theorem2_threshold = m.m3 * zeta_scale;
    Ok(out)
}

impl TheoryBounds {
    /// Adds `λ*` for sparse Riesz rank `q_star`.
    pub fn with_rank(mut self, q_star: usize) -> Result<Self> {
        let budget = SparsityBudget::new(self.q, self.eta1, self.eta2)?;
        self.q_star = Some(q_star);
        self.lambda_star = Some(lambda_star(&budget, self.c_lower, self.c_upper, q_star, self.n)?);
        Ok(self)
    }

    /// Adds `λ_{n,p}` and the success probability lower bound.
    pub fn with_noise(mut self, noise: &NoiseModel) -> Result<Self> {
        self.lambda_np = Some(lambda_np(noise.sigma, noise.c0, noise.a_n, self.c_upper, self.n, noise.p)?);
        self.success_prob = Some(success_probability(noise.p, noise.a_n, noise.c0));
        Ok(self)
    }

    /// `λ ≥ max(λ*, λ_{n,p})` for whichever floors are known.
    pub fn lambda_in_range(&self) -> bool {
        self.lambda_star.is_none_or(|l| self.lambda >= l) && self.lambda_np.is_none_or(|l| self.lambda >= l)
    }
}
