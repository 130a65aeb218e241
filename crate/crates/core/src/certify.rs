//! Sparse eigenvalue extremes and sparse Riesz condition certificates.
//!
//! `c_*(m)` and `c^*(m)` are the smallest and largest eigenvalues of `Σ_A`
//! over all column subsets with `|A| = m`. They can be computed exactly by
//! enumeration, bounded through a Geršgorin-type argument on standardized
//! designs, or bracketed from the inside by randomized local search.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::design::DesignMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, Combinations};

/// Default cap on the number of subsets an exact enumeration may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1_000_000;

/// Smallest eigenvalue accepted as non-singular by [`irrepresentable_check`].
pub const SINGULAR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertMethod {
    Exact,
    Gersgorin,
    Sampled,
}

impl fmt::Display for CertMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertMethod::Exact => "exact",
            CertMethod::Gersgorin => "gersgorin",
            CertMethod::Sampled => "sampled",
        })
    }
}

impl FromStr for CertMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(CertMethod::Exact),
            "gersgorin" => Ok(CertMethod::Gersgorin),
            "sampled" => Ok(CertMethod::Sampled),
            other => Err(Error::Spec(format!("unknown certification method {other:?}"))),
        }
    }
}

/// Spectrum bounds for all `rank`-column Gram submatrices.
///
/// For `exact` certificates the bounds are the true extremes. For `gersgorin`
/// they enclose them. For `sampled` they are enclosed by them: `c_lower` is an
/// upper bound on `c_*(rank)` and `c_upper` a lower bound on `c^*(rank)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrcCertificate {
    pub rank: usize,
    pub c_lower: f64,
    pub c_upper: f64,
    pub method: CertMethod,
    pub exact: bool,
    pub delta: Option<f64>,
}

impl SrcCertificate {
    /// `C = c^* / c_*`; infinite when `c_lower` is zero.
    pub fn spectrum_ratio(&self) -> f64 {
        if self.c_lower > 0.0 {
            self.c_upper / self.c_lower
        } else {
            f64::INFINITY
        }
    }
}

/// Exact `(c_*(m), c^*(m))` by enumerating every `m`-subset.
pub fn sparse_extremes_exact(x: &DesignMatrix, m: usize, budget: u128) -> Result<SrcCertificate> {
    let p = x.p();
    if m == 0 || m > p {
        return Err(Error::Index(format!("rank {m} outside 1..={p}")));
    }
    let count = linalg::binomial(p, m);
    if count > budget {
        return Err(Error::Budget { count, budget });
    }
    let gram = x.gram();
    let (lo, hi) = enumerate_extremes(&gram, m);
    Ok(SrcCertificate {
        rank: m,
        c_lower: clamp_lower(lo, m, x.n()),
        c_upper: hi,
        method: CertMethod::Exact,
        exact: true,
        delta: None,
    })
}

// The rank of any n-row Gram matrix is at most n.
fn clamp_lower(lo: f64, m: usize, n: usize) -> f64 {
    if m > n {
        0.0
    } else {
        lo.max(0.0)
    }
}

fn enumerate_extremes(gram: &DMatrix<f64>, m: usize) -> (f64, f64) {
    let p = gram.nrows();
    (0..=p - m)
        .into_par_iter()
        .map(|first| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut idx = vec![first; m];
            Combinations::new(first + 1, p, m - 1).for_each(|rest| {
                idx[1..].copy_from_slice(rest);
                let (a, b) = linalg::sym_extremes(&linalg::principal(gram, &idx));
                lo = lo.min(a);
                hi = hi.max(b);
            });
            (lo, hi)
        })
        .reduce(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |a, b| (a.0.min(b.0), a.1.max(b.1)),
        )
}

/// Hölder exponent used in the Geršgorin-type bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Finite(f64),
    Infinity,
}

/// `{1, 2, 4, ∞}`.
pub const DEFAULT_ALPHA_GRID: [Alpha; 4] = [
    Alpha::Finite(1.0),
    Alpha::Finite(2.0),
    Alpha::Finite(4.0),
    Alpha::Infinity,
];

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Finite(a) => write!(f, "{a}"),
            Alpha::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Alpha::Infinity);
        }
        match s.parse::<f64>() {
            Ok(a) if a.is_infinite() && a > 0.0 => Ok(Alpha::Infinity),
            Ok(a) if a >= 1.0 => Ok(Alpha::Finite(a)),
            _ => Err(Error::Spec(format!("alpha must be a number >= 1 or inf, got {s:?}"))),
        }
    }
}

impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Alpha::Finite(a) => s.serialize_f64(*a),
            Alpha::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(a) => Ok(Alpha::Finite(a)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// The Geršgorin quantity for one exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaBound {
    pub alpha: Alpha,
    pub value: f64,
    /// Whether the maximum over subsets was enumerated rather than bounded.
    pub exact_max: bool,
}

/// Result of [`gersgorin_certificate`]. `certificate` is `None` when
/// `delta >= 1`, in which case the bound says nothing about the design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GersgorinOutcome {
    pub rank: usize,
    pub delta: f64,
    pub per_alpha: Vec<AlphaBound>,
    pub certificate: Option<SrcCertificate>,
}

/// Certifies `1 - δ ≤ c_*(q*) ≤ c^*(q*) ≤ 1 + δ` on a standardized design.
///
/// For each finite `α` the maximum over `|A| = q*` of
/// `(Σ_{j∈A} ‖ρ_{j,A∖j}‖_r^α)^{1/α}` with `r = α/(α-1)` is enumerated when
/// `binomial(p, q*) ≤ budget`, otherwise bounded row-wise using the `q* - 1`
/// largest off-diagonal correlations of each row. The `∞` entry uses
/// `(q* - 1) max_{j<k} |ρ_jk|`. `δ` is the minimum over the grid.
pub fn gersgorin_certificate(
    x: &DesignMatrix,
    q_star: usize,
    alpha_grid: &[Alpha],
    budget: u128,
) -> Result<GersgorinOutcome> {
    if !x.is_standardized() {
        return Err(Error::Precondition(
            "Geršgorin certificate requires a standardized design".into(),
        ));
    }
    let p = x.p();
    if q_star == 0 || q_star > p {
        return Err(Error::Index(format!("rank {q_star} outside 1..={p}")));
    }
    if alpha_grid.is_empty() || !alpha_grid.contains(&Alpha::Infinity) {
        return Err(Error::Precondition(
            "alpha grid must contain the infinite exponent".into(),
        ));
    }
    if let Some(Alpha::Finite(a)) = alpha_grid
        .iter()
        .find(|a| matches!(a, Alpha::Finite(v) if !(*v >= 1.0 && v.is_finite())))
    {
        return Err(Error::Precondition(format!("alpha {a} is below 1")));
    }

    let mut abs_corr = x.gram().abs();
    abs_corr.fill_diagonal(0.0);
    let enumerate = linalg::binomial(p, q_star) <= budget;

    let per_alpha: Vec<AlphaBound> = alpha_grid
        .iter()
        .map(|&alpha| match alpha {
            Alpha::Infinity => AlphaBound {
                alpha,
                value: (q_star - 1) as f64 * abs_corr.max(),
                exact_max: true,
            },
            Alpha::Finite(a) => {
                let value = if enumerate {
                    max_subset_quantity(&abs_corr, q_star, a)
                } else {
                    rowwise_quantity_bound(&abs_corr, q_star, a)
                };
                AlphaBound {
                    alpha,
                    value,
                    exact_max: enumerate,
                }
            }
        })
        .collect();

    let delta = per_alpha
        .iter()
        .map(|b| b.value)
        .fold(f64::INFINITY, f64::min);
    let certificate = (delta < 1.0).then_some(SrcCertificate {
        rank: q_star,
        c_lower: 1.0 - delta,
        c_upper: 1.0 + delta,
        method: CertMethod::Gersgorin,
        exact: false,
        delta: Some(delta),
    });
    Ok(GersgorinOutcome {
        rank: q_star,
        delta,
        per_alpha,
        certificate,
    })
}

/// `‖v‖_r^α` with `r = α/(α-1)` (so `r = ∞` at `α = 1`).
fn row_term(values: impl Iterator<Item = f64>, alpha: f64) -> f64 {
    if alpha == 1.0 {
        values.fold(0.0, f64::max)
    } else {
        let r = alpha / (alpha - 1.0);
        values.map(|v| v.powf(r)).sum::<f64>().powf(alpha / r)
    }
}

fn subset_quantity(abs_corr: &DMatrix<f64>, idx: &[usize], alpha: f64) -> f64 {
    let total: f64 = idx
        .iter()
        .map(|&j| row_term(idx.iter().filter(|&&k| k != j).map(|&k| abs_corr[(j, k)]), alpha))
        .sum();
    total.powf(1.0 / alpha)
}

fn max_subset_quantity(abs_corr: &DMatrix<f64>, q_star: usize, alpha: f64) -> f64 {
    let p = abs_corr.nrows();
    (0..=p - q_star)
        .into_par_iter()
        .map(|first| {
            let mut best = 0.0f64;
            let mut idx = vec![first; q_star];
            Combinations::new(first + 1, p, q_star - 1).for_each(|rest| {
                idx[1..].copy_from_slice(rest);
                best = best.max(subset_quantity(abs_corr, &idx, alpha));
            });
            best
        })
        .reduce(|| 0.0, f64::max)
}

fn rowwise_quantity_bound(abs_corr: &DMatrix<f64>, q_star: usize, alpha: f64) -> f64 {
    let p = abs_corr.nrows();
    let mut row_bounds: Vec<f64> = (0..p)
        .map(|j| {
            let mut row: Vec<f64> = (0..p).filter(|&k| k != j).map(|k| abs_corr[(j, k)]).collect();
            row.sort_by(|a, b| b.total_cmp(a));
            row.truncate(q_star - 1);
            row_term(row.into_iter(), alpha)
        })
        .collect();
    row_bounds.sort_by(|a, b| b.total_cmp(a));
    row_bounds.iter().take(q_star).sum::<f64>().powf(1.0 / alpha)
}

/// Randomized inner bracket of `(c_*(m), c^*(m))`.
///
/// Draws random `m`-subsets and improves each by greedy single-index swaps
/// (accepted on strict improvement, at most `2mp` evaluations per search).
/// `budget` caps the total number of subset eigen-evaluations. When
/// `budget ≥ binomial(p, m)` every subset is enumerated instead and the exact
/// certificate is returned.
pub fn sampled_extremes(x: &DesignMatrix, m: usize, budget: usize, seed: u64) -> Result<SrcCertificate> {
    let p = x.p();
    if m == 0 || m > p {
        return Err(Error::Index(format!("rank {m} outside 1..={p}")));
    }
    if budget == 0 {
        return Err(Error::Precondition("sampling budget must be at least 1".into()));
    }
    if budget as u128 >= linalg::binomial(p, m) {
        return sparse_extremes_exact(x, m, budget as u128);
    }

    let gram = x.gram();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut used = 0usize;
    let swap_cap = 2 * m * p;

    while used < budget {
        let mut start: Vec<usize> = index::sample(&mut rng, p, m).into_vec();
        start.sort_unstable();
        let (a, b) = linalg::sym_extremes(&linalg::principal(&gram, &start));
        used += 1;
        lo = lo.min(a);
        hi = hi.max(b);

        for direction in [Direction::Lower, Direction::Upper] {
            let cap = swap_cap.min(budget - used);
            if cap == 0 {
                break;
            }
            let (value, spent) = local_search(&gram, start.clone(), direction, cap);
            used += spent;
            match direction {
                Direction::Lower => lo = lo.min(value),
                Direction::Upper => hi = hi.max(value),
            }
        }
    }

    Ok(SrcCertificate {
        rank: m,
        c_lower: clamp_lower(lo, m, x.n()),
        c_upper: hi,
        method: CertMethod::Sampled,
        exact: false,
        delta: None,
    })
}

#[derive(Debug, Clone, Copy)]
enum Direction {
    Lower,
    Upper,
}

fn local_search(gram: &DMatrix<f64>, mut set: Vec<usize>, dir: Direction, cap: usize) -> (f64, usize) {
    let p = gram.nrows();
    let score = |s: &[usize]| {
        let (a, b) = linalg::sym_extremes(&linalg::principal(gram, s));
        match dir {
            Direction::Lower => -a,
            Direction::Upper => b,
        }
    };
    let mut in_set = vec![false; p];
    for &j in &set {
        in_set[j] = true;
    }
    let mut best = score(&set);
    let mut spent = 0usize;
    'search: loop {
        for pos in 0..set.len() {
            for cand in 0..p {
                if in_set[cand] {
                    continue;
                }
                if spent == cap {
                    break 'search;
                }
                let old = set[pos];
                set[pos] = cand;
                let value = score(&set);
                spent += 1;
                if value > best {
                    best = value;
                    in_set[old] = false;
                    in_set[cand] = true;
                    continue 'search;
                }
                set[pos] = old;
            }
        }
        break;
    }
    let value = match dir {
        Direction::Lower => -best,
        Direction::Upper => best,
    };
    (value, spent)
}

/// Outcome of the strong irrepresentable condition check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrrepresentableDiagnostic {
    /// `‖Σ_21 Σ_11^{-1} s_1‖_∞`, zero when `A_1` is every column.
    pub value: f64,
    pub kappa: f64,
    /// `value < 1 - κ`.
    pub holds: bool,
}

/// Evaluates `‖Σ_21 Σ_11^{-1} s_1‖_∞ < 1 - κ`; `signs[i]` belongs to `a1[i]`.
pub fn irrepresentable_check(
    x: &DesignMatrix,
    a1: &[usize],
    signs: &[f64],
    kappa: f64,
) -> Result<IrrepresentableDiagnostic> {
    if a1.is_empty() {
        return Err(Error::Precondition("A1 must be non-empty".into()));
    }
    if signs.len() != a1.len() {
        return Err(Error::Dimension(format!(
            "{} signs for {} indices",
            signs.len(),
            a1.len()
        )));
    }
    if signs.iter().any(|&s| s != 1.0 && s != -1.0) {
        return Err(Error::Precondition("signs must be +1 or -1".into()));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::Precondition(format!("kappa {kappa} outside (0, 1]")));
    }
    x.checked_indices(a1)?;

    let gram = x.gram();
    let sigma11 = linalg::principal(&gram, a1);
    let (min_eig, _) = linalg::sym_extremes(&sigma11);
    if min_eig <= SINGULAR_TOL {
        return Err(Error::Singular {
            min_eigenvalue: min_eig,
        });
    }
    let chol = sigma11
        .cholesky()
        .ok_or(Error::Singular { min_eigenvalue: min_eig })?;
    let w = chol.solve(&DVector::from_column_slice(signs));

    let mut member = vec![false; x.p()];
    for &j in a1 {
        member[j] = true;
    }
    let value = (0..x.p())
        .filter(|&j| !member[j])
        .map(|j| {
            a1.iter()
                .zip(w.iter())
                .map(|(&k, &wk)| gram[(j, k)] * wk)
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max);
    Ok(IrrepresentableDiagnostic {
        value,
        kappa,
        holds: value < 1.0 - kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Rows of an `n × p` matrix whose Gram `X'X/n` is the equicorrelation
    /// matrix with parameter `rho`: `x_j = √(1-ρ) e_j + √ρ 1`-style factor
    /// built from a symmetric square root.
    fn equicorrelated(p: usize, rho: f64) -> DesignMatrix {
        let sigma = DMatrix::from_fn(p, p, |a, b| if a == b { 1.0 } else { rho });
        let chol = sigma.cholesky().unwrap();
        // X = √p · L' gives X'X / p = L L' = Σ.
        let x = chol.l().transpose() * (p as f64).sqrt();
        DesignMatrix::new(x).unwrap().mark_standardized().unwrap()
    }

    fn orthonormal(n: usize) -> DesignMatrix {
        // Hadamard-type columns of ±1 for n a power of two.
        let x = DMatrix::from_fn(n, n, |i, j| {
            if (i & j).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        });
        DesignMatrix::new(x).unwrap().mark_standardized().unwrap()
    }

    #[test]
    fn orthonormal_exact_extremes_are_one() {
        let x = orthonormal(8);
        for m in 1..=8 {
            let c = sparse_extremes_exact(&x, m, DEFAULT_ENUMERATION_BUDGET).unwrap();
            assert_abs_diff_eq!(c.c_lower, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(c.c_upper, 1.0, epsilon = 1e-12);
            assert!(c.exact);
        }
    }

    #[test]
    fn rank_beyond_n_has_zero_lower_extreme() {
        let x = DesignMatrix::from_rows(&[
            vec![1.0, 0.3, -0.2, 0.8],
            vec![0.1, 1.0, 0.5, -0.4],
            vec![-0.6, 0.2, 1.0, 0.9],
        ])
        .unwrap();
        let c = sparse_extremes_exact(&x, 4, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(c.c_lower, 0.0);
    }

    #[test]
    fn equicorrelation_exact_extremes() {
        let x = equicorrelated(5, 0.1);
        let c = sparse_extremes_exact(&x, 3, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_abs_diff_eq!(c.c_lower, 0.9, epsilon = 1e-10);
        assert_abs_diff_eq!(c.c_upper, 1.2, epsilon = 1e-10);
    }

    #[test]
    fn budget_and_rank_errors() {
        let x = orthonormal(16);
        match sparse_extremes_exact(&x, 8, 1000) {
            Err(Error::Budget { count, .. }) => assert_eq!(count, 12_870),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            sparse_extremes_exact(&x, 17, DEFAULT_ENUMERATION_BUDGET),
            Err(Error::Index(_))
        ));
    }

    #[test]
    fn gersgorin_orthogonal_design() {
        let x = orthonormal(8);
        let out = gersgorin_certificate(&x, 4, &DEFAULT_ALPHA_GRID, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_abs_diff_eq!(out.delta, 0.0, epsilon = 1e-12);
        let cert = out.certificate.unwrap();
        assert_abs_diff_eq!(cert.c_lower, 1.0, epsilon = 1e-12);
        assert_eq!(cert.method, CertMethod::Gersgorin);
    }

    #[test]
    fn gersgorin_max_correlation_form() {
        // Every pairwise correlation equals 1/30; rank 11 gives δ = 10/30.
        let x = equicorrelated(12, 1.0 / 30.0);
        let out = gersgorin_certificate(&x, 11, &[Alpha::Infinity], 0).unwrap();
        assert_abs_diff_eq!(out.delta, 1.0 / 3.0, epsilon = 1e-12);
        let cert = out.certificate.unwrap();
        assert_abs_diff_eq!(cert.c_lower, 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cert.c_upper, 4.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cert.spectrum_ratio(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn gersgorin_contains_exact_interval() {
        let x = equicorrelated(5, 0.1);
        let out = gersgorin_certificate(&x, 5, &DEFAULT_ALPHA_GRID, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let cert = out.certificate.unwrap();
        assert_abs_diff_eq!(cert.c_lower, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(cert.c_upper, 1.4, epsilon = 1e-12);
        let exact = sparse_extremes_exact(&x, 5, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_abs_diff_eq!(exact.c_lower, 0.9, epsilon = 1e-10);
        assert_abs_diff_eq!(exact.c_upper, 1.4, epsilon = 1e-10);
        assert!(cert.c_lower <= exact.c_lower + 1e-12 && exact.c_upper <= cert.c_upper + 1e-12);
    }

    #[test]
    fn finite_alpha_quantities_by_hand() {
        // Equicorrelation ρ = 0.1 at rank 3: every row has two entries 0.1.
        let x = equicorrelated(4, 0.1);
        let out = gersgorin_certificate(&x, 3, &DEFAULT_ALPHA_GRID, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let get = |i: usize| out.per_alpha[i].value;
        // α = 1: Σ_j max_k |ρ| = 3 · 0.1.
        assert_abs_diff_eq!(get(0), 0.3, epsilon = 1e-12);
        // α = 2: (Σ_j Σ_k ρ²)^{1/2} = (3 · 2 · 0.01)^{1/2}.
        assert_abs_diff_eq!(get(1), 0.06f64.sqrt(), epsilon = 1e-12);
        // α = ∞: 2 · 0.1.
        assert_abs_diff_eq!(get(3), 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(out.delta, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn rowwise_bound_dominates_enumeration() {
        let x = equicorrelated(7, 0.05);
        for &a in &[1.0, 2.0, 4.0] {
            let mut abs_corr = x.gram().abs();
            abs_corr.fill_diagonal(0.0);
            let exact = max_subset_quantity(&abs_corr, 4, a);
            let bound = rowwise_quantity_bound(&abs_corr, 4, a);
            assert!(bound >= exact - 1e-12, "alpha {a}: {bound} < {exact}");
        }
    }

    #[test]
    fn gersgorin_no_certificate_and_preconditions() {
        let x = DesignMatrix::from_rows(&[vec![1.0, 1.0, 1.0], vec![1.0, 0.9, -1.0], vec![1.0, 1.1, 1.0]])
            .unwrap()
            .standardize_columns()
            .unwrap();
        let out = gersgorin_certificate(&x, 3, &DEFAULT_ALPHA_GRID, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert!(out.delta >= 1.0);
        assert!(out.certificate.is_none());

        let raw = DesignMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert!(matches!(
            gersgorin_certificate(&raw, 2, &DEFAULT_ALPHA_GRID, 10),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            gersgorin_certificate(&x, 2, &[Alpha::Finite(2.0)], 10),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sampled_orthonormal_and_fallback() {
        let x = orthonormal(8);
        for seed in 0..3 {
            let c = sampled_extremes(&x, 3, 5, seed).unwrap();
            assert_abs_diff_eq!(c.c_lower, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(c.c_upper, 1.0, epsilon = 1e-12);
            assert!(!c.exact);
        }
        let y = equicorrelated(5, 0.1);
        let c = sampled_extremes(&y, 3, 10, 7).unwrap();
        let e = sparse_extremes_exact(&y, 3, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(c, e);
    }

    #[test]
    fn sampled_is_deterministic() {
        let x = equicorrelated(9, 0.2);
        let a = sampled_extremes(&x, 4, 20, 11).unwrap();
        let b = sampled_extremes(&x, 4, 20, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn irrepresentable_examples() {
        let x = orthonormal(4);
        let d = irrepresentable_check(&x, &[0, 2], &[1.0, -1.0], 0.9).unwrap();
        assert_abs_diff_eq!(d.value, 0.0, epsilon = 1e-12);
        assert!(d.holds);

        let x = equicorrelated(2, 0.5);
        let d = irrepresentable_check(&x, &[0], &[1.0], 0.4).unwrap();
        assert_abs_diff_eq!(d.value, 0.5, epsilon = 1e-12);
        assert!(d.holds);
        // The condition is strict: v = 0.5 fails at κ = 0.5.
        assert!(!irrepresentable_check(&x, &[0], &[1.0], 0.5).unwrap().holds);

        let d = irrepresentable_check(&x, &[0, 1], &[1.0, 1.0], 0.5).unwrap();
        assert_eq!(d.value, 0.0);
        assert!(d.holds);
    }

    #[test]
    fn irrepresentable_singular() {
        let x = DesignMatrix::from_rows(&[vec![1.0, 1.0, 0.0], vec![-1.0, -1.0, 1.0]]).unwrap();
        assert!(matches!(
            irrepresentable_check(&x, &[0, 1], &[1.0, 1.0], 0.5),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn certificate_json_fields() {
        let c = SrcCertificate {
            rank: 3,
            c_lower: 0.5,
            c_upper: 1.5,
            method: CertMethod::Gersgorin,
            exact: false,
            delta: Some(0.5),
        };
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"rank": 3, "c_lower": 0.5, "c_upper": 1.5, "method": "gersgorin", "exact": false, "delta": 0.5})
        );
    }
}
