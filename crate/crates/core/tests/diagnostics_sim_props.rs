mod common;

use nalgebra::DVector;
use proptest::prelude::*;
use rand::seq::index;
use rand::Rng;

use common::{correlated_design, rng};
use riesz_lasso::sim::{
    gen_gaussian_design, run_experiment, CovarianceSpec, ExperimentConfig, LambdaRule, MagnitudeRule,
};
use riesz_lasso::{
    missing_coefficients, prop2_probability, selected_model_bias, solve_lasso, sparse_extremes_exact,
    sparsity_profile, theorem_bounds, theorem_verdicts, DesignMatrix, Exponent, Prop2Epsilons, DEFAULT_ETA2_BUDGET,
    DEFAULT_MAX_SWEEPS,
};

/// Coefficients with `q` large entries and a few small ones.
fn coefficients(p: usize, q: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let mut beta: Vec<f64> = vec![0.0; p];
    for j in index::sample(&mut r, p, p.min(q + 4)) {
        beta[j] = if beta.iter().filter(|b| b.abs() > 1.0).count() < q {
            r.random_range(2.0..4.0) * if r.random_bool(0.5) { 1.0 } else { -1.0 }
        } else {
            r.random_range(-0.2..0.2)
        };
    }
    beta
}

/// Largest `‖Σ_{j∈A} β_j x_j‖` over subsets of the given indices.
fn eta2_oracle(x: &DesignMatrix, beta: &[f64], small: &[usize]) -> f64 {
    let mut best: f64 = 0.0;
    for mask in 0u32..(1 << small.len()) {
        let mut v = DVector::zeros(x.n());
        for (k, &j) in small.iter().enumerate() {
            if mask >> k & 1 == 1 {
                v += x.column(j) * beta[j];
            }
        }
        best = best.max(v.norm());
    }
    best
}

fn random_subset(p: usize, r: &mut impl Rng) -> Vec<usize> {
    let k = r.random_range(0..=p);
    let mut s = index::sample(r, p, k).into_vec();
    s.sort_unstable();
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn eta2_bracket_contains_enumerated_value(
        n in 4usize..30, p in 3usize..14, q in 0usize..3, budget_exp in 0u32..17, seed in any::<u64>()
    ) {
        let x = correlated_design(n, p, 0.6, seed);
        let beta = coefficients(p, q.min(p), seed);
        let prof = sparsity_profile(&x, &beta, q.min(p), 1u128 << budget_exp).unwrap();
        let small: Vec<usize> = prof.a0.iter().copied().filter(|&j| beta[j] != 0.0).collect();
        let exact = eta2_oracle(&x, &beta, &small);
        prop_assert!(prof.eta2_lower <= exact + 1e-10);
        prop_assert!(exact <= prof.eta2_upper + 1e-10);
        if prof.eta2_exact {
            prop_assert!((prof.eta2_upper - exact).abs() <= 1e-10 * exact.max(1.0));
        }
    }

    #[test]
    fn bias_shrinks_as_the_model_grows(n in 4usize..30, p in 2usize..15, seed in any::<u64>()) {
        let x = correlated_design(n, p, 0.6, seed);
        let beta = coefficients(p, 2.min(p), seed);
        let mut r = rng(seed ^ 3);
        let a = random_subset(p, &mut r);
        let mut bigger = a.clone();
        bigger.extend(random_subset(p, &mut r));
        bigger.sort_unstable();
        bigger.dedup();
        let small = selected_model_bias(&x, &beta, &a).unwrap();
        let large = selected_model_bias(&x, &beta, &bigger).unwrap();
        prop_assert!(large <= small + 1e-10);
    }

    #[test]
    fn missing_mass_is_controlled_by_bias(n in 6usize..30, p in 3usize..11, q in 1usize..4, seed in any::<u64>()) {
        let q = q.min(p);
        let x = correlated_design(n, p, 0.6, seed);
        let beta = coefficients(p, q, seed);
        let prof = sparsity_profile(&x, &beta, q, DEFAULT_ETA2_BUDGET).unwrap();
        let mut r = rng(seed ^ 5);
        let a_hat = random_subset(p, &mut r);
        let mut union = a_hat.clone();
        for j in prof.large(p) {
            if !a_hat.contains(&j) {
                union.push(j);
            }
        }
        prop_assume!(!union.is_empty());
        let c_lower = sparse_extremes_exact(&x, union.len(), 1 << 20).unwrap().c_lower;
        prop_assume!(c_lower > 1e-8);
        let bias = selected_model_bias(&x, &beta, &a_hat).unwrap();
        let zeta2 = missing_coefficients(&beta, &prof.a0, &a_hat, &[Exponent::Finite(2.0)])["2"];
        let rhs = (bias + prof.eta2_upper).powi(2) / (n as f64 * c_lower);
        prop_assert!(zeta2 * zeta2 <= rhs * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn loss_norms_are_ordered(n in 10usize..40, p in 2usize..30, frac in 0.01f64..1.0, seed in any::<u64>()) {
        let x = correlated_design(n, p, 0.3, seed);
        let beta = coefficients(p, 2.min(p), seed);
        let mut r = rng(seed ^ 9);
        let y: Vec<f64> = x.mul_vec(&beta).iter().map(|m| m + r.random_range(-1.0..1.0)).collect();
        let lambda = frac * riesz_lasso::lambda_max(&x, &y) + 1e-9;
        let sol = solve_lasso(&x, &y, lambda, 1e-9, DEFAULT_MAX_SWEEPS).unwrap();
        let q = 2.min(p);
        let prof = sparsity_profile(&x, &beta, q, DEFAULT_ETA2_BUDGET).unwrap();
        let bounds = theorem_bounds(&prof.budget(), 0.5, 1.5, lambda, n).unwrap();
        let d = theorem_verdicts(&x, &beta, &prof, &sol, &bounds).unwrap();
        let l = d.losses;
        prop_assert!(l.linf <= l.l2 + 1e-15 && l.l2 <= l.l1 + 1e-15);
        prop_assert_eq!(d.q_tilde - d.q_hat, d.zeta["0"] as usize);
    }
}

#[test]
fn missed_large_count_matches_zeta0_in_every_replication() {
    let mut cfg = ExperimentConfig::new(40, 60, 4);
    cfg.covariance = CovarianceSpec::Ar1 { rho: 0.5 };
    cfg.magnitude = MagnitudeRule::Fixed(0.6);
    cfg.eta1 = 0.2;
    cfg.small_count = 5;
    cfg.replications = 30;
    cfg.path_points = 0;
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.replications.len(), 30);
    for rec in &r.replications {
        let d = &rec.diagnostics;
        assert_eq!(d.q_tilde - d.q_hat, d.zeta["0"] as usize);
    }
}

#[test]
fn orthonormal_spike_always_clears_the_selection_threshold() {
    // Soft thresholding at λ/n keeps any spike of size 10λ/n.
    let x = common::hadamard(16);
    let lambda = 4.0;
    let mut r = rng(21);
    let mut hits = 0;
    for _ in 0..100 {
        let mut beta = vec![0.0; 16];
        let j = r.random_range(0..16);
        beta[j] = 10.0 * lambda / 16.0;
        let y: Vec<f64> = x.mul_vec(&beta).iter().map(|m| m + r.random_range(-0.3..0.3)).collect();
        let sol = solve_lasso(&x, &y, lambda, 1e-10, DEFAULT_MAX_SWEEPS).unwrap();
        let prof = sparsity_profile(&x, &beta, 1, DEFAULT_ETA2_BUDGET).unwrap();
        let bounds = theorem_bounds(&prof.budget(), 1.0, 1.0, lambda, 16).unwrap();
        if theorem_verdicts(&x, &beta, &prof, &sol, &bounds).unwrap().verdicts.theorem2 {
            hits += 1;
        }
    }
    assert_eq!(hits, 100);
}

#[test]
fn gaussian_sparse_eigenvalue_event_meets_its_probability_bound() {
    let (m, n, p, reps) = (2, 200, 10, 200);
    let eps = Prop2Epsilons {
        eps1: 0.3,
        eps2: 0.3,
        eps3: 0.02,
        eps4: 0.025,
    };
    let bound = prop2_probability(eps, m, n, p).unwrap();
    let mut inside = 0;
    for seed in 0..reps {
        let g = gen_gaussian_design(n, p, &CovarianceSpec::Identity, seed).unwrap();
        let c = sparse_extremes_exact(&g.design, m, 1 << 20).unwrap();
        if bound.tau_lower * g.rho_lower <= c.c_lower && c.c_upper <= bound.tau_upper * g.rho_upper {
            inside += 1;
        }
    }
    let freq = inside as f64 / reps as f64;
    let se = (bound.probability * (1.0 - bound.probability) / reps as f64).sqrt();
    assert!(freq >= bound.probability - 3.0 * se, "{freq} vs {}", bound.probability);
}

#[test]
fn tiny_noise_keeps_bias_and_missing_mass_within_bounds() {
    let mut cfg = ExperimentConfig::new(80, 50, 3);
    cfg.sigma = 1e-6;
    cfg.lambda = LambdaRule::Fixed { value: 3.0 };
    cfg.replications = 20;
    cfg.path_points = 0;
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.frequencies.bias, 1.0);
    assert_eq!(r.frequencies.zeta2, 1.0);
}
