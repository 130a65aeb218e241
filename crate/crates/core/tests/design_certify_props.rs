mod common;

use nalgebra::DVector;
use proptest::prelude::*;
use rand::seq::index;
use rand::Rng;

use common::{correlated_design, normal_vec, rng};
use riesz_lasso::linalg::sym_eigenvalues;
use riesz_lasso::{gersgorin_certificate, sampled_extremes, sparse_extremes_exact, DEFAULT_ALPHA_GRID};

const BUDGET: u128 = 1 << 20;

fn exact_profile(x: &riesz_lasso::DesignMatrix) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0)];
    for m in 1..=x.p() {
        let c = sparse_extremes_exact(x, m, BUDGET).unwrap();
        out.push((c.c_lower, c.c_upper));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn subset_grams_are_consistent(n in 3usize..30, p in 2usize..10, mix in 0.0f64..2.0, seed in any::<u64>()) {
        let x = correlated_design(n, p, mix, seed);
        let full = x.subset_gram(&(0..p).collect::<Vec<_>>()).unwrap();
        let mut r = rng(seed ^ 1);
        let k = r.random_range(1..=p);
        let idx = index::sample(&mut r, p, k).into_vec();
        let sub = x.subset_gram(&idx).unwrap();
        let ev = sub.eigenvalues();
        let top = ev.last().copied().unwrap();
        prop_assert!(ev[0] >= -1e-10 * top.abs().max(1.0));
        for (a, &i) in sub.indices.iter().enumerate() {
            prop_assert!((sub.matrix[(a, a)] - 1.0).abs() <= 1e-8);
            for (b, &j) in sub.indices.iter().enumerate() {
                prop_assert!((sub.matrix[(a, b)] - full.matrix[(i, j)]).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn sparse_eigenvalues_are_monotone_and_subadditive(
        n in 3usize..40, p in 2usize..9, mix in 0.0f64..2.0, seed in any::<u64>()
    ) {
        let x = correlated_design(n, p, mix, seed);
        let e = exact_profile(&x);
        for m in 2..=p {
            prop_assert!(e[m].0 <= e[m - 1].0 + 1e-12);
            prop_assert!(e[m].1 >= e[m - 1].1 - 1e-12);
        }
        for a in 1..=p {
            for b in 1..=p - a {
                prop_assert!(e[a + b].1 <= e[a].1 + e[b].1 + 1e-8);
            }
        }
    }

    #[test]
    fn quadratic_forms_sit_inside_sparse_extremes(
        n in 3usize..40, p in 2usize..9, mix in 0.0f64..2.0, seed in any::<u64>()
    ) {
        let x = correlated_design(n, p, mix, seed);
        let e = exact_profile(&x);
        let mut r = rng(seed ^ 2);
        for _ in 0..20 {
            let m = r.random_range(1..=p);
            let k = r.random_range(1..=m);
            let idx = index::sample(&mut r, p, k).into_vec();
            let v = normal_vec(k, &mut r);
            let mut b = vec![0.0; p];
            for (a, &j) in idx.iter().enumerate() {
                b[j] = v[a];
            }
            let vv: f64 = v.iter().map(|t| t * t).sum();
            let q = x.mul_vec(&b).norm_squared() / n as f64;
            prop_assert!(e[m].0 * vv <= q + 1e-10 * vv);
            prop_assert!(q <= e[m].1 * vv + 1e-8);
        }
    }

    #[test]
    fn gersgorin_sandwich(n in 50usize..400, p in 2usize..9, mix in 0.0f64..0.4, seed in any::<u64>()) {
        let x = correlated_design(n, p, mix, seed);
        let e = exact_profile(&x);
        for q_star in 1..=p {
            let g = gersgorin_certificate(&x, q_star, &DEFAULT_ALPHA_GRID, BUDGET).unwrap();
            if g.delta < 1.0 {
                for &(lo, hi) in &e[1..=q_star] {
                    prop_assert!(1.0 - g.delta <= lo + 1e-9);
                    prop_assert!(hi <= 1.0 + g.delta + 1e-9);
                }
            }
        }
    }

    #[test]
    fn sampled_bracket_lies_inside_exact(
        n in 5usize..40, p in 4usize..11, budget in 1usize..60, seed in any::<u64>()
    ) {
        let x = correlated_design(n, p, 0.7, seed);
        let m = 1 + (seed as usize % (p - 1));
        let exact = sparse_extremes_exact(&x, m, BUDGET).unwrap();
        let s = sampled_extremes(&x, m, budget, seed).unwrap();
        prop_assert!(s.c_lower >= exact.c_lower - 1e-12);
        prop_assert!(s.c_upper <= exact.c_upper + 1e-12);
        prop_assert!(s.c_lower <= s.c_upper + 1e-12);
    }
}

#[test]
fn full_gram_spectrum_matches_rank_p_extremes() {
    let x = correlated_design(30, 6, 0.5, 11);
    let g = x.gram();
    let ev = sym_eigenvalues(&g);
    let c = sparse_extremes_exact(&x, 6, BUDGET).unwrap();
    assert!((c.c_lower - ev[0]).abs() < 1e-12);
    assert!((c.c_upper - ev[5]).abs() < 1e-12);
    let v = DVector::from_element(6, 1.0);
    assert!(v.dot(&(&g * &v)) / 6.0 <= c.c_upper + 1e-12);
}
