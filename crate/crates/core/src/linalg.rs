//! Small dense linear-algebra and combinatorics helpers.

use nalgebra::DMatrix;
use statrs::function::gamma::ln_gamma;

/// Replaces `m` by `(m + m') / 2`.
pub fn symmetrize(m: &mut DMatrix<f64>) {
    let k = m.nrows();
    for a in 0..k {
        for b in (a + 1)..k {
            let v = 0.5 * (m[(a, b)] + m[(b, a)]);
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
}

/// Eigenvalues of a symmetric matrix, increasing.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `(λ_min, λ_max)` of a symmetric matrix; `(0, 0)` when empty.
pub fn sym_extremes(m: &DMatrix<f64>) -> (f64, f64) {
    match m.nrows() {
        0 => (0.0, 0.0),
        1 => (m[(0, 0)], m[(0, 0)]),
        2 => {
            let (a, b, d) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
            let mid = 0.5 * (a + d);
            let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            (mid - rad, mid + rad)
        }
        _ => {
            let ev = m.clone().symmetric_eigenvalues();
            (ev.min(), ev.max())
        }
    }
}

/// Principal submatrix of `g` on `idx` (in the given order).
pub fn principal(g: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |a, b| g[(idx[a], idx[b])])
}

/// `binomial(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        let num = (n - i) as u128;
        let den = (i + 1) as u128;
        let g = gcd(acc, den);
        let (a, d) = (acc / g, den / g);
        let Some(next) = a.checked_mul(num / d) else {
            return u128::MAX;
        };
        acc = next;
    }
    acc
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `ln binomial(n, k)` via log-gamma.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Lexicographic `k`-subsets of `start..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(start: usize, n: usize, k: usize) -> Self {
        let done = start + k > n;
        Self {
            n,
            current: (start..start + k).collect(),
            done,
        }
    }

    /// Advances to the next subset; returns `false` once exhausted.
    fn advance(&mut self) -> bool {
        let k = self.current.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.current[i] < self.n - k + i {
                self.current[i] += 1;
                for t in (i + 1)..k {
                    self.current[t] = self.current[t - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    /// Visits every subset without allocating.
    pub fn for_each(mut self, mut f: impl FnMut(&[usize])) {
        if self.done {
            return;
        }
        loop {
            f(&self.current);
            if !self.advance() {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(50, 10), 10_272_278_170);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(7, 0), 1);
        assert_eq!(binomial(10_000, 5_000), u128::MAX);
        assert!((ln_binomial(50, 10) - (10_272_278_170f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut seen = Vec::new();
        Combinations::new(0, 5, 3).for_each(|c| seen.push(c.to_vec()));
        assert_eq!(seen.len(), 10);
        assert_eq!(seen[0], vec![0, 1, 2]);
        assert_eq!(seen[9], vec![2, 3, 4]);
        let mut tail = 0;
        Combinations::new(2, 5, 2).for_each(|_| tail += 1);
        assert_eq!(tail, 3);
        let mut empty = 0;
        Combinations::new(0, 3, 0).for_each(|c| {
            assert!(c.is_empty());
            empty += 1;
        });
        assert_eq!(empty, 1);
    }

    #[test]
    fn two_by_two_extremes_match_general_solver() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.7, 0.7, 1.0]);
        let (lo, hi) = sym_extremes(&m);
        let ev = sym_eigenvalues(&m);
        assert!((lo - ev[0]).abs() < 1e-14 && (hi - ev[1]).abs() < 1e-14);
    }
}
