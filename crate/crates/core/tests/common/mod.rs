#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use riesz_lasso::DesignMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian design with a shared factor of weight `mix`, standardized.
pub fn correlated_design(n: usize, p: usize, mix: f64, seed: u64) -> DesignMatrix {
    let mut r = rng(seed);
    let common: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
    let raw = DMatrix::from_fn(n, p, |i, _| {
        let z: f64 = StandardNormal.sample(&mut r);
        z + mix * common[i]
    });
    DesignMatrix::new(raw).unwrap().standardize_columns().unwrap()
}

pub fn normal_vec(len: usize, r: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(r)).collect()
}

pub fn hadamard(n: usize) -> DesignMatrix {
    let x = DMatrix::from_fn(n, n, |i, j| if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 });
    DesignMatrix::new(x).unwrap().mark_standardized().unwrap()
}
