//! Synthetic designs and coefficient vectors.

use nalgebra::DMatrix;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::design::DesignMatrix;
use crate::error::{Error, Result};
use crate::linalg;

/// Independent random stream `stream` under seed `master`.
pub fn stream_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// Population covariance of a design row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovarianceSpec {
    Identity,
    /// `Σ_jk = ρ^|j−k|`.
    Ar1 { rho: f64 },
    /// Unit diagonal, `ρ` off the diagonal.
    Equicorrelation { rho: f64 },
    /// `Σ_jk = seq[|j−k|]`, zero beyond the sequence.
    Toeplitz { seq: Vec<f64> },
    /// I.i.d. uniform(−K, K) entries rescaled to unit variance.
    BoundedUniform { k: f64 },
}

#[derive(Debug, Clone)]
enum Sampler {
    Independent,
    Ar1 { rho: f64 },
    OneFactor { rho: f64 },
    /// Upper Cholesky factor `R` with `R'R = Σ`; a row is `z' R`.
    Factor(DMatrix<f64>),
    Uniform { half_width: f64 },
}

/// A covariance spec resolved for a fixed `p`: its sampler and the
/// population Riesz bounds `ρ_* ≤ eig(Σ) ≤ ρ^*`.
#[derive(Debug, Clone)]
pub struct CovarianceModel {
    pub p: usize,
    pub rho_lower: f64,
    pub rho_upper: f64,
    sampler: Sampler,
}

impl CovarianceModel {
    pub fn new(spec: &CovarianceSpec, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Spec("p must be positive".into()));
        }
        let (rho_lower, rho_upper, sampler) = match spec {
            CovarianceSpec::Identity => (1.0, 1.0, Sampler::Independent),
            CovarianceSpec::Ar1 { rho } => {
                let r = rho.abs();
                if !(r < 1.0) {
                    return Err(Error::Spec(format!("ar1 needs |rho| < 1, got {rho}")));
                }
                ((1.0 - r) / (1.0 + r), (1.0 + r) / (1.0 - r), Sampler::Ar1 { rho: *rho })
            }
            CovarianceSpec::Equicorrelation { rho } => {
                let pf = p as f64;
                if p > 1 && !(*rho < 1.0 && *rho > -1.0 / (pf - 1.0)) {
                    return Err(Error::Spec(format!(
                        "equicorrelation with rho = {rho} is not positive definite for p = {p}"
                    )));
                }
                let (a, b) = if p == 1 { (1.0, 1.0) } else { (1.0 - rho, 1.0 + (pf - 1.0) * rho) };
                let sampler = if *rho >= 0.0 {
                    Sampler::OneFactor { rho: *rho }
                } else {
                    Sampler::Factor(cholesky_factor(&equicorrelation(p, *rho))?)
                };
                (a.min(b), a.max(b), sampler)
            }
            CovarianceSpec::Toeplitz { seq } => {
                if seq.is_empty() {
                    return Err(Error::Spec("toeplitz sequence is empty".into()));
                }
                let sigma = DMatrix::from_fn(p, p, |a, b| seq.get(a.abs_diff(b)).copied().unwrap_or(0.0));
                let factor = cholesky_factor(&sigma)?;
                let (lo, hi) = linalg::sym_extremes(&sigma);
                (lo, hi, Sampler::Factor(factor))
            }
            CovarianceSpec::BoundedUniform { k } => {
                if !(*k > 0.0 && k.is_finite()) {
                    return Err(Error::Spec(format!("bounded_uniform needs K > 0, got {k}")));
                }
                (1.0, 1.0, Sampler::Uniform { half_width: 3f64.sqrt() })
            }
        };
        Ok(Self {
            p,
            rho_lower,
            rho_upper,
            sampler,
        })
    }

    /// Variance of every coordinate (the covariance diagonal).
    pub fn unit_diagonal(&self) -> bool {
        match &self.sampler {
            Sampler::Factor(r) => (0..self.p).all(|j| (r.column(j).norm_squared() - 1.0).abs() < 1e-12),
            _ => true,
        }
    }

    /// `n` i.i.d. rows.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<DesignMatrix> {
        let p = self.p;
        let mut x = DMatrix::<f64>::zeros(n, p);
        match &self.sampler {
            Sampler::Independent => {
                for i in 0..n {
                    for j in 0..p {
                        x[(i, j)] = StandardNormal.sample(rng);
                    }
                }
            }
            Sampler::Ar1 { rho } => {
                let innov = (1.0 - rho * rho).sqrt();
                for i in 0..n {
                    let mut prev: f64 = StandardNormal.sample(rng);
                    x[(i, 0)] = prev;
                    for j in 1..p {
                        let z: f64 = StandardNormal.sample(rng);
                        prev = rho * prev + innov * z;
                        x[(i, j)] = prev;
                    }
                }
            }
            Sampler::OneFactor { rho } => {
                let (a, b) = ((1.0 - rho).sqrt(), rho.sqrt());
                for i in 0..n {
                    let w: f64 = StandardNormal.sample(rng);
                    for j in 0..p {
                        let z: f64 = StandardNormal.sample(rng);
                        x[(i, j)] = a * z + b * w;
                    }
                }
            }
            Sampler::Factor(r) => {
                let z = DMatrix::<f64>::from_fn(n, p, |_, _| StandardNormal.sample(rng));
                x = z * r;
            }
            Sampler::Uniform { half_width } => {
                for i in 0..n {
                    for j in 0..p {
                        x[(i, j)] = rng.random_range(-half_width..*half_width);
                    }
                }
            }
        }
        DesignMatrix::new(x)
    }
}

fn equicorrelation(p: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(p, p, |a, b| if a == b { 1.0 } else { rho })
}

fn cholesky_factor(sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = sigma
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Spec("covariance is not positive definite".into()))?;
    Ok(chol.l().transpose())
}

/// A sampled design with the population Riesz bounds of its covariance.
#[derive(Debug, Clone)]
pub struct GeneratedDesign {
    pub design: DesignMatrix,
    pub rho_lower: f64,
    pub rho_upper: f64,
}

/// `n` i.i.d. zero-mean rows with covariance `spec`, reproducible from `seed`.
pub fn gen_gaussian_design(n: usize, p: usize, spec: &CovarianceSpec, seed: u64) -> Result<GeneratedDesign> {
    let model = CovarianceModel::new(spec, p)?;
    let design = model.sample(n, &mut ChaCha8Rng::seed_from_u64(seed))?;
    Ok(GeneratedDesign {
        design,
        rho_lower: model.rho_lower,
        rho_upper: model.rho_upper,
    })
}

/// Positions and signs of the large and small coefficients, before the
/// large magnitude is chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientLayout {
    pub p: usize,
    pub large: Vec<(usize, f64)>,
    pub small: Vec<(usize, f64)>,
    pub small_magnitude: f64,
}

impl CoefficientLayout {
    /// Draws `q` large and `small_count` small positions (disjoint) with
    /// random signs; small coefficients share magnitude `eta1 / small_count`.
    pub fn draw<R: Rng + ?Sized>(p: usize, q: usize, eta1: f64, small_count: usize, rng: &mut R) -> Result<Self> {
        if q + small_count > p {
            return Err(Error::Spec(format!("q + small_count = {} exceeds p = {p}", q + small_count)));
        }
        if !(eta1 >= 0.0) {
            return Err(Error::Spec(format!("eta1 must be non-negative, got {eta1}")));
        }
        if small_count == 0 && eta1 > 0.0 {
            return Err(Error::Spec("eta1 > 0 requires small_count > 0".into()));
        }
        let positions = index::sample(rng, p, q + small_count).into_vec();
        let sign = |rng: &mut R| if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let large = positions[..q].iter().map(|&j| (j, sign(rng))).collect();
        let small = positions[q..].iter().map(|&j| (j, sign(rng))).collect();
        Ok(Self {
            p,
            large,
            small,
            small_magnitude: if small_count == 0 { 0.0 } else { eta1 / small_count as f64 },
        })
    }

    pub fn materialize(&self, magnitude: f64) -> Vec<f64> {
        let mut beta = vec![0.0; self.p];
        for &(j, s) in &self.large {
            beta[j] = s * magnitude;
        }
        for &(j, s) in &self.small {
            beta[j] = s * self.small_magnitude;
        }
        beta
    }

    /// The vector with every large coefficient zeroed.
    pub fn small_part(&self) -> Vec<f64> {
        self.materialize(0.0)
    }
}

/// `q` coefficients of size `magnitude` and `small_count` of size
/// `eta1_target / small_count`, random signs and disjoint random positions.
pub fn gen_coefficients(
    p: usize,
    q: usize,
    magnitude: f64,
    eta1_target: f64,
    small_count: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let layout = CoefficientLayout::draw(p, q, eta1_target, small_count, &mut ChaCha8Rng::seed_from_u64(seed))?;
    Ok(layout.materialize(magnitude))
}
