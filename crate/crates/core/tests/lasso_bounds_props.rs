mod common;

use proptest::prelude::*;

use common::{correlated_design, normal_vec, rng};
use riesz_lasso::{
    invariant_ratios, kkt_report, lambda_max, lambda_star, m_star_constants, solve_lasso, solve_lasso_traced,
    theorem_bounds, SparsityBudget, DEFAULT_MAX_SWEEPS,
};

const TOL: f64 = 1e-9;

fn instance(n: usize, p: usize, seed: u64) -> (riesz_lasso::DesignMatrix, Vec<f64>) {
    let x = correlated_design(n, p, 0.5, seed);
    let mut r = rng(seed ^ 7);
    let mut beta = vec![0.0; p];
    beta[0] = 2.0;
    beta[p / 2] = -1.0;
    let mean = x.mul_vec(&beta);
    let noise = normal_vec(n, &mut r);
    let y = mean.iter().zip(&noise).map(|(m, e)| m + e).collect();
    (x, y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn solutions_pass_their_own_kkt_check(
        n in 10usize..60, p in 2usize..80, frac in 0.01f64..1.2, seed in any::<u64>()
    ) {
        let (x, y) = instance(n, p, seed);
        let lambda = frac * lambda_max(&x, &y) + 1e-9;
        let sol = solve_lasso(&x, &y, lambda, TOL, DEFAULT_MAX_SWEEPS).unwrap();
        prop_assert!(sol.kkt.satisfied);
        let again = kkt_report(&x, &y, &sol.beta_hat, lambda, TOL).unwrap();
        prop_assert!(again.satisfied);
        prop_assert_eq!(sol.q_hat, sol.beta_hat.iter().filter(|b| **b != 0.0).count());
        if frac >= 1.0 {
            prop_assert_eq!(sol.q_hat, 0);
        }
    }

    #[test]
    fn objective_never_increases_across_sweeps(
        n in 10usize..50, p in 2usize..60, frac in 0.01f64..0.9, seed in any::<u64>()
    ) {
        let (x, y) = instance(n, p, seed);
        let lambda = frac * lambda_max(&x, &y);
        let (_, trace) = solve_lasso_traced(&x, &y, lambda, TOL, DEFAULT_MAX_SWEEPS).unwrap();
        for w in trace.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
        }
    }

    #[test]
    fn scaling_response_and_penalty_scales_solution(
        n in 10usize..50, p in 2usize..40, frac in 0.05f64..0.9, s in 0.1f64..10.0, seed in any::<u64>()
    ) {
        let (x, y) = instance(n, p, seed);
        let lambda = frac * lambda_max(&x, &y);
        let a = solve_lasso(&x, &y, lambda, 1e-12, DEFAULT_MAX_SWEEPS).unwrap();
        let ys: Vec<f64> = y.iter().map(|v| v * s).collect();
        let b = solve_lasso(&x, &ys, s * lambda, 1e-12, DEFAULT_MAX_SWEEPS).unwrap();
        for (u, v) in a.beta_hat.iter().zip(&b.beta_hat) {
            prop_assert!((u * s - v).abs() <= 1e-8 * s.max(1.0));
        }
    }

    #[test]
    fn m_constants_do_not_increase_with_penalty(
        q in 1usize..20, eta1 in 0.0f64..2.0, eta2 in 0.0f64..5.0,
        c_lower in 0.1f64..1.0, c_upper in 1.0f64..4.0, n in 10usize..1000,
        l0 in 0.1f64..100.0, step in 1.0f64..3.0
    ) {
        let b = SparsityBudget::new(q, eta1, eta2).unwrap();
        let mut prev: Option<riesz_lasso::MStar> = None;
        for k in 0..10 {
            let lambda = l0 * step.powi(k);
            let r = invariant_ratios(&b, c_lower, c_upper, lambda, n).unwrap();
            let m = m_star_constants(r.r1, r.r2, r.c);
            if let Some(p) = prev {
                prop_assert!(m.m1 <= p.m1 + 1e-12 * p.m1);
                prop_assert!(m.m2 <= p.m2 + 1e-12 * p.m2);
                prop_assert!(m.m3 <= p.m3 + 1e-12 * p.m3);
            }
            prev = Some(m);
        }
    }

    #[test]
    fn zero_ratio_constants_match_closed_forms(c in 1.0f64..10.0) {
        let m = m_star_constants(0.0, 0.0, c);
        prop_assert!((m.m2 - (m.m1 / 3.0 + 32.0 * c * c / 9.0)).abs() <= 1e-12);
        prop_assert!((m.m3 - (2.0 / 3.0 + 28.0 * c / 9.0 + 16.0 * c * c / 9.0)).abs() <= 1e-12);
    }

    #[test]
    fn penalty_floor_meets_the_rank(
        q in 1usize..10, eta1 in 0.0f64..0.1, eta2 in 0.0f64..1.0,
        c_lower in 0.3f64..1.0, c_upper in 1.0f64..2.0, n in 20usize..500, q_star in 1usize..500
    ) {
        let b = SparsityBudget::new(q, eta1, eta2).unwrap();
        let ls = lambda_star(&b, c_lower, c_upper, q_star, n).unwrap();
        if ls.is_finite() && ls > 0.0 {
            let r = invariant_ratios(&b, c_lower, c_upper, ls, n).unwrap();
            let m = m_star_constants(r.r1, r.r2, r.c);
            prop_assert!((m.m1 * q as f64 + 1.0 - q_star as f64).abs() <= 1e-9);
        }
    }

    #[test]
    fn ratios_are_scale_invariant(
        q in 1usize..20, eta1 in 0.0f64..2.0, eta2 in 0.0f64..5.0, lambda in 0.1f64..50.0,
        c_lower in 0.1f64..1.0, c_upper in 1.0f64..4.0, n in 10usize..1000, s in 0.01f64..100.0
    ) {
        let a = invariant_ratios(&SparsityBudget::new(q, eta1, eta2).unwrap(), c_lower, c_upper, lambda, n).unwrap();
        let b = invariant_ratios(
            &SparsityBudget::new(q, eta1 / s, eta2 / s).unwrap(), c_lower, c_upper, lambda / s, n,
        ).unwrap();
        prop_assert!((a.r1 - b.r1).abs() <= 1e-10 * a.r1.max(1.0));
        prop_assert!((a.r2 - b.r2).abs() <= 1e-10 * a.r2.max(1.0));
        prop_assert_eq!(a.c, b.c);
        let ta = theorem_bounds(&SparsityBudget::new(q, eta1, eta2).unwrap(), c_lower, c_upper, lambda, n).unwrap();
        let tb = theorem_bounds(
            &SparsityBudget::new(q, eta1 / s, eta2 / s).unwrap(), c_lower, c_upper, lambda / s, n,
        ).unwrap();
        prop_assert!((ta.q_hat_bound - tb.q_hat_bound).abs() <= 1e-9 * ta.q_hat_bound);
        prop_assert!((ta.bias_bound / (s * s) - tb.bias_bound).abs() <= 1e-9 * tb.bias_bound.max(1e-300));
    }
}
