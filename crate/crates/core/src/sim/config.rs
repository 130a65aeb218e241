//! Flat `key = value` configuration files.
//!
//! One entry per line, `#` starts a comment, blank lines are ignored. Keys
//! outside a file type's vocabulary are rejected, as are keys that do not
//! apply to the chosen options.

use std::collections::BTreeMap;
use std::fmt::{Display, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::generate::CovarianceSpec;
use crate::bounds::{lambda_np, theorem_bounds, NoiseModel, SparsityBudget, TheoryBounds};
use crate::certify::DEFAULT_ENUMERATION_BUDGET;
use crate::diagnostics::DEFAULT_ETA2_BUDGET;
use crate::error::{Error, Result};
use crate::lasso::{DEFAULT_MAX_SWEEPS, DEFAULT_TOL};

fn config_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

/// Parsed entries awaiting typed extraction.
#[derive(Debug, Clone)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    /// Parses `text`, rejecting duplicates and keys not in `known`.
    pub fn parse(text: &str, known: &[&str]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected key = value, got {line:?}"),
                });
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "empty key".into(),
                });
            }
            if !known.contains(&key) {
                return Err(config_err(key, "unknown key"));
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(config_err(key, "duplicate key"));
            }
        }
        Ok(Self { entries })
    }

    pub fn take_str(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    pub fn take<T>(&mut self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.entries
            .remove(key)
            .map(|v| v.parse::<T>().map_err(|e| config_err(key, format!("cannot parse {v:?}: {e}"))))
            .transpose()
    }

    pub fn take_or<T>(&mut self, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.take(key)?.unwrap_or(default))
    }

    pub fn require<T>(&mut self, key: &str) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.take(key)?.ok_or_else(|| config_err(key, "required key is missing"))
    }

    /// Fails on the first key that was never consumed.
    pub fn finish(self) -> Result<()> {
        match self.entries.into_keys().next() {
            Some(key) => Err(config_err(&key, "key does not apply to the chosen options")),
            None => Ok(()),
        }
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| config_err(key, format!("cannot parse {s:?}: {e}")))
        })
        .collect()
}

fn join_list(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// How large coefficients are sized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum MagnitudeRule {
    Fixed(f64),
    /// Multiple of the square root of each replication's selection threshold.
    ThresholdMultiple(f64),
}

/// How the penalty is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum LambdaRule {
    Fixed { value: f64 },
    /// `λ_{n,p}` from the noise level and the upper sparse eigenvalue.
    Np { c0: f64, a_n: f64 },
}

/// Source of the sparse eigenvalue pair used for `λ` and the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SrcMethod {
    Exact { budget: u64 },
    Gersgorin { budget: u64 },
    Sampled { budget: usize },
    /// Population Riesz bounds of the covariance, no certification.
    Population,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignMode {
    Fresh,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientMode {
    Fixed,
    Fresh,
}

/// Minimum acceptable frequencies; a run below any of them fails.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Requirements {
    pub q_tilde: Option<f64>,
    pub bias: Option<f64>,
    pub zeta2: Option<f64>,
    pub theorem2: Option<f64>,
    pub support: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub covariance: CovarianceSpec,
    /// Rescale sampled columns to `‖x_j‖² = n`.
    pub standardize: bool,
    pub magnitude: MagnitudeRule,
    pub eta1: f64,
    pub small_count: usize,
    pub sigma: f64,
    pub lambda: LambdaRule,
    pub replications: usize,
    pub master_seed: u64,
    pub src_method: SrcMethod,
    /// Certification rank; defaults to `(2 + 4C)q + 1` with the population `C`.
    pub src_rank: Option<usize>,
    pub design: DesignMode,
    pub coefficients: CoefficientMode,
    pub tol: f64,
    pub max_sweeps: usize,
    pub eta2_budget: u64,
    /// Points on the plotted penalty path; 0 disables it.
    pub path_points: usize,
    /// Smallest path penalty as a fraction of the replication penalty.
    pub path_ratio: f64,
    pub requirements: Requirements,
}

const EXPERIMENT_KEYS: &[&str] = &[
    "n",
    "p",
    "q",
    "covariance",
    "rho",
    "toeplitz",
    "bound_k",
    "standardize",
    "magnitude",
    "magnitude_threshold_multiple",
    "eta1",
    "small_count",
    "sigma",
    "lambda",
    "c0",
    "a_n",
    "replications",
    "seed",
    "src_method",
    "src_budget",
    "src_rank",
    "design",
    "coefficients",
    "tol",
    "max_sweeps",
    "eta2_budget",
    "path_points",
    "path_ratio",
    "require_q_tilde",
    "require_bias",
    "require_zeta2",
    "require_theorem2",
    "require_support",
];

impl ExperimentConfig {
    /// A minimal configuration with defaults for everything but the sizes.
    pub fn new(n: usize, p: usize, q: usize) -> Self {
        Self {
            n,
            p,
            q,
            covariance: CovarianceSpec::Identity,
            standardize: true,
            magnitude: MagnitudeRule::Fixed(1.0),
            eta1: 0.0,
            small_count: 0,
            sigma: 1.0,
            lambda: LambdaRule::Np { c0: 0.0, a_n: 0.0 },
            replications: 100,
            master_seed: 0,
            src_method: SrcMethod::Population,
            src_rank: None,
            design: DesignMode::Fresh,
            coefficients: CoefficientMode::Fixed,
            tol: DEFAULT_TOL,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            eta2_budget: DEFAULT_ETA2_BUDGET as u64,
            path_points: 20,
            path_ratio: 0.25,
            requirements: Requirements::default(),
        }
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut kv = KeyValues::parse(text, EXPERIMENT_KEYS)?;
        let mut cfg = Self::new(kv.require("n")?, kv.require("p")?, kv.require("q")?);

        let kind = kv.take_str("covariance").unwrap_or_else(|| "identity".into());
        cfg.covariance = match kind.as_str() {
            "identity" => CovarianceSpec::Identity,
            "ar1" => CovarianceSpec::Ar1 { rho: kv.require("rho")? },
            "equicorrelation" => CovarianceSpec::Equicorrelation { rho: kv.require("rho")? },
            "toeplitz" => {
                let raw: String = kv.require("toeplitz")?;
                CovarianceSpec::Toeplitz {
                    seq: parse_list("toeplitz", &raw)?,
                }
            }
            "bounded_uniform" => CovarianceSpec::BoundedUniform { k: kv.require("bound_k")? },
            other => return Err(config_err("covariance", format!("unknown covariance {other:?}"))),
        };
        cfg.standardize = kv.take_or("standardize", cfg.standardize)?;

        let fixed: Option<f64> = kv.take("magnitude")?;
        let multiple: Option<f64> = kv.take("magnitude_threshold_multiple")?;
        cfg.magnitude = match (fixed, multiple) {
            (Some(_), Some(_)) => {
                return Err(config_err(
                    "magnitude_threshold_multiple",
                    "cannot be combined with magnitude",
                ))
            }
            (Some(m), None) => MagnitudeRule::Fixed(m),
            (None, Some(k)) => MagnitudeRule::ThresholdMultiple(k),
            (None, None) => cfg.magnitude,
        };
        cfg.eta1 = kv.take_or("eta1", cfg.eta1)?;
        cfg.small_count = kv.take_or("small_count", cfg.small_count)?;
        cfg.sigma = kv.take_or("sigma", cfg.sigma)?;

        let lambda = kv.take_str("lambda").unwrap_or_else(|| "np".into());
        cfg.lambda = if lambda == "np" {
            LambdaRule::Np {
                c0: kv.take_or("c0", 0.0)?,
                a_n: kv.take_or("a_n", 0.0)?,
            }
        } else {
            let value = lambda
                .parse::<f64>()
                .map_err(|e| config_err("lambda", format!("expected a number or np, got {lambda:?}: {e}")))?;
            LambdaRule::Fixed { value }
        };

        cfg.replications = kv.take_or("replications", cfg.replications)?;
        cfg.master_seed = kv.take_or("seed", cfg.master_seed)?;

        let method = kv.take_str("src_method").unwrap_or_else(|| "none".into());
        cfg.src_method = match method.as_str() {
            "exact" => SrcMethod::Exact {
                budget: kv.take_or("src_budget", DEFAULT_ENUMERATION_BUDGET as u64)?,
            },
            "gersgorin" => SrcMethod::Gersgorin {
                budget: kv.take_or("src_budget", DEFAULT_ENUMERATION_BUDGET as u64)?,
            },
            "sampled" => SrcMethod::Sampled {
                budget: kv.take_or("src_budget", 200)?,
            },
            "none" => SrcMethod::Population,
            other => return Err(config_err("src_method", format!("unknown method {other:?}"))),
        };
        if cfg.src_method != SrcMethod::Population {
            cfg.src_rank = kv.take("src_rank")?;
        }

        cfg.design = match kv.take_str("design").as_deref() {
            None | Some("fresh") => DesignMode::Fresh,
            Some("fixed") => DesignMode::Fixed,
            Some(other) => return Err(config_err("design", format!("expected fresh or fixed, got {other:?}"))),
        };
        cfg.coefficients = match kv.take_str("coefficients").as_deref() {
            None | Some("fixed") => CoefficientMode::Fixed,
            Some("fresh") => CoefficientMode::Fresh,
            Some(other) => {
                return Err(config_err(
                    "coefficients",
                    format!("expected fixed or fresh, got {other:?}"),
                ))
            }
        };
        cfg.tol = kv.take_or("tol", cfg.tol)?;
        cfg.max_sweeps = kv.take_or("max_sweeps", cfg.max_sweeps)?;
        cfg.eta2_budget = kv.take_or("eta2_budget", cfg.eta2_budget)?;
        cfg.path_points = kv.take_or("path_points", cfg.path_points)?;
        cfg.path_ratio = kv.take_or("path_ratio", cfg.path_ratio)?;
        cfg.requirements = Requirements {
            q_tilde: kv.take("require_q_tilde")?,
            bias: kv.take("require_bias")?,
            zeta2: kv.take("require_zeta2")?,
            theorem2: kv.take("require_theorem2")?,
            support: kv.take("require_support")?,
        };
        kv.finish()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, key: &str, msg: &str| if ok { Ok(()) } else { Err(config_err(key, msg)) };
        check(self.n >= 1, "n", "must be at least 1")?;
        check(self.p >= 1, "p", "must be at least 1")?;
        check(self.q <= self.p, "q", "must not exceed p")?;
        check(self.q + self.small_count <= self.p, "small_count", "q + small_count must not exceed p")?;
        check(self.eta1 >= 0.0, "eta1", "must be non-negative")?;
        check(self.small_count > 0 || self.eta1 == 0.0, "eta1", "eta1 > 0 needs small_count > 0")?;
        check(self.sigma > 0.0 && self.sigma.is_finite(), "sigma", "must be positive")?;
        check(self.replications >= 1, "replications", "must be at least 1")?;
        check(self.tol > 0.0, "tol", "must be positive")?;
        check(self.path_ratio > 0.0 && self.path_ratio < 1.0, "path_ratio", "must lie in (0, 1)")?;
        check(self.path_points != 1, "path_points", "must be 0 or at least 2")?;
        match self.magnitude {
            MagnitudeRule::Fixed(m) => check(m > 0.0 && m.is_finite(), "magnitude", "must be positive")?,
            MagnitudeRule::ThresholdMultiple(k) => check(
                k > 0.0 && k.is_finite(),
                "magnitude_threshold_multiple",
                "must be positive",
            )?,
        }
        match self.lambda {
            LambdaRule::Fixed { value } => check(value > 0.0 && value.is_finite(), "lambda", "must be positive")?,
            LambdaRule::Np { c0, a_n } => {
                check(c0 >= 0.0, "c0", "must be non-negative")?;
                check(a_n >= 0.0, "a_n", "must be non-negative")?;
            }
        }
        if let Some(m) = self.src_rank {
            check(m >= 1 && m <= self.p, "src_rank", "must lie in 1..=p")?;
        }
        for (key, v) in [
            ("require_q_tilde", self.requirements.q_tilde),
            ("require_bias", self.requirements.bias),
            ("require_zeta2", self.requirements.zeta2),
            ("require_theorem2", self.requirements.theorem2),
            ("require_support", self.requirements.support),
        ] {
            if let Some(v) = v {
                check((0.0..=1.0).contains(&v), key, "must lie in [0, 1]")?;
            }
        }
        Ok(())
    }

    /// Renders the configuration so that `from_kv` reproduces it exactly.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: &dyn Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("n", &self.n);
        put("p", &self.p);
        put("q", &self.q);
        match &self.covariance {
            CovarianceSpec::Identity => put("covariance", &"identity"),
            CovarianceSpec::Ar1 { rho } => {
                put("covariance", &"ar1");
                put("rho", rho);
            }
            CovarianceSpec::Equicorrelation { rho } => {
                put("covariance", &"equicorrelation");
                put("rho", rho);
            }
            CovarianceSpec::Toeplitz { seq } => {
                put("covariance", &"toeplitz");
                put("toeplitz", &join_list(seq));
            }
            CovarianceSpec::BoundedUniform { k } => {
                put("covariance", &"bounded_uniform");
                put("bound_k", k);
            }
        }
        put("standardize", &self.standardize);
        match self.magnitude {
            MagnitudeRule::Fixed(m) => put("magnitude", &m),
            MagnitudeRule::ThresholdMultiple(k) => put("magnitude_threshold_multiple", &k),
        }
        put("eta1", &self.eta1);
        put("small_count", &self.small_count);
        put("sigma", &self.sigma);
        match self.lambda {
            LambdaRule::Fixed { value } => put("lambda", &value),
            LambdaRule::Np { c0, a_n } => {
                put("lambda", &"np");
                put("c0", &c0);
                put("a_n", &a_n);
            }
        }
        put("replications", &self.replications);
        put("seed", &self.master_seed);
        match self.src_method {
            SrcMethod::Exact { budget } => {
                put("src_method", &"exact");
                put("src_budget", &budget);
            }
            SrcMethod::Gersgorin { budget } => {
                put("src_method", &"gersgorin");
                put("src_budget", &budget);
            }
            SrcMethod::Sampled { budget } => {
                put("src_method", &"sampled");
                put("src_budget", &budget);
            }
            SrcMethod::Population => put("src_method", &"none"),
        }
        if self.src_method != SrcMethod::Population {
            if let Some(m) = self.src_rank {
                put("src_rank", &m);
            }
        }
        put(
            "design",
            &match self.design {
                DesignMode::Fresh => "fresh",
                DesignMode::Fixed => "fixed",
            },
        );
        put(
            "coefficients",
            &match self.coefficients {
                CoefficientMode::Fixed => "fixed",
                CoefficientMode::Fresh => "fresh",
            },
        );
        put("tol", &self.tol);
        put("max_sweeps", &self.max_sweeps);
        put("eta2_budget", &self.eta2_budget);
        put("path_points", &self.path_points);
        put("path_ratio", &self.path_ratio);
        let r = &self.requirements;
        for (k, v) in [
            ("require_q_tilde", r.q_tilde),
            ("require_bias", r.bias),
            ("require_zeta2", r.zeta2),
            ("require_theorem2", r.theorem2),
            ("require_support", r.support),
        ] {
            if let Some(v) = v {
                put(k, &v);
            }
        }
        s
    }
}

/// Scalars for a stand-alone bound evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsConfig {
    pub q: usize,
    pub eta1: f64,
    pub eta2: f64,
    pub c_lower: f64,
    pub c_upper: f64,
    pub n: usize,
    /// Fixed penalty, or `None` for `λ_{n,p}`.
    pub lambda: Option<f64>,
    pub q_star: Option<usize>,
    pub noise: Option<NoiseModel>,
}

const BOUNDS_KEYS: &[&str] = &[
    "q", "eta1", "eta2", "c_lower", "c_upper", "n", "lambda", "q_star", "p", "sigma", "c0", "a_n",
];

impl BoundsConfig {
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut kv = KeyValues::parse(text, BOUNDS_KEYS)?;
        let q = kv.require("q")?;
        let eta1 = kv.take_or("eta1", 0.0)?;
        let eta2 = kv.take_or("eta2", 0.0)?;
        let c_lower = kv.require("c_lower")?;
        let c_upper = kv.require("c_upper")?;
        let n = kv.require("n")?;
        let raw: String = kv.require("lambda")?;
        let lambda = if raw == "np" {
            None
        } else {
            Some(
                raw.parse::<f64>()
                    .map_err(|e| config_err("lambda", format!("expected a number or np, got {raw:?}: {e}")))?,
            )
        };
        let q_star = kv.take("q_star")?;
        let p: Option<usize> = kv.take("p")?;
        let noise = match p {
            Some(p) => Some(NoiseModel {
                sigma: kv.take_or("sigma", 1.0)?,
                c0: kv.take_or("c0", 0.0)?,
                a_n: kv.take_or("a_n", 0.0)?,
                p,
            }),
            None if lambda.is_none() => return Err(config_err("p", "required when lambda = np")),
            None => None,
        };
        kv.finish()?;
        Ok(Self {
            q,
            eta1,
            eta2,
            c_lower,
            c_upper,
            n,
            lambda,
            q_star,
            noise,
        })
    }

    pub fn evaluate(&self) -> Result<TheoryBounds> {
        let budget = SparsityBudget::new(self.q, self.eta1, self.eta2)?;
        let lambda = match (self.lambda, &self.noise) {
            (Some(l), _) => l,
            (None, Some(nm)) => lambda_np(nm.sigma, nm.c0, nm.a_n, self.c_upper, self.n, nm.p)?,
            (None, None) => return Err(config_err("p", "required when lambda = np")),
        };
        let mut bounds = theorem_bounds(&budget, self.c_lower, self.c_upper, lambda, self.n)?;
        if let Some(q_star) = self.q_star {
            bounds = bounds.with_rank(q_star)?;
        }
        if let Some(nm) = &self.noise {
            bounds = bounds.with_noise(nm)?;
        }
        Ok(bounds)
    }
}

/// Parameters of a Wishart extreme-eigenvalue study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WishartConfig {
    pub m: usize,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub tau_lower: f64,
    pub tau_upper: f64,
    pub require_freq: Option<f64>,
}

const WISHART_KEYS: &[&str] = &["m", "n", "replications", "seed", "tau_lower", "tau_upper", "require_freq"];

impl WishartConfig {
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut kv = KeyValues::parse(text, WISHART_KEYS)?;
        let cfg = Self {
            m: kv.require("m")?,
            n: kv.require("n")?,
            replications: kv.take_or("replications", 500)?,
            seed: kv.take_or("seed", 0)?,
            tau_lower: kv.require("tau_lower")?,
            tau_upper: kv.require("tau_upper")?,
            require_freq: kv.take("require_freq")?,
        };
        kv.finish()?;
        if cfg.replications == 0 {
            return Err(config_err("replications", "must be at least 1"));
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::from_kv("n = 10\np = 5\nq = 1\nlamda = 3\n").unwrap_err();
        match err {
            Error::Config { key, .. } => assert_eq!(key, "lamda"),
            other => panic!("{other:?}"),
        }
        assert!(err_key(BoundsConfig::from_kv("q = 1\nfoo = 2")).contains("foo"));
    }

    fn err_key<T: std::fmt::Debug>(r: Result<T>) -> String {
        r.unwrap_err().to_string()
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = ExperimentConfig::from_kv(
            "# sizes\nn = 20   # rows\n\np=30\nq = 2\ncovariance = ar1\nrho = 0.3\nlambda = 4.5\n",
        )
        .unwrap();
        assert_eq!((cfg.n, cfg.p, cfg.q), (20, 30, 2));
        assert_eq!(cfg.covariance, CovarianceSpec::Ar1 { rho: 0.3 });
        assert_eq!(cfg.lambda, LambdaRule::Fixed { value: 4.5 });
    }

    #[test]
    fn inapplicable_and_duplicate_keys() {
        assert!(ExperimentConfig::from_kv("n = 2\np = 2\nq = 1\nrho = 0.3").is_err());
        assert!(ExperimentConfig::from_kv("n = 2\nn = 3\np = 2\nq = 1").is_err());
        assert!(ExperimentConfig::from_kv("n = 2\np = 2\nq = 3").is_err());
        assert!(ExperimentConfig::from_kv("n = 2\np = 2\nq = 1\nsigma = 0").is_err());
        assert!(ExperimentConfig::from_kv("n = 2\np = 2\nq = 1\nreplications = 0").is_err());
        assert!(ExperimentConfig::from_kv("n 2").is_err());
    }

    #[test]
    fn rendering_round_trips() {
        let text = "n = 50\np = 80\nq = 3\ncovariance = toeplitz\ntoeplitz = 1, 0.4, 0.1\n\
                    magnitude_threshold_multiple = 2\neta1 = 0.3\nsmall_count = 4\nsigma = 0.5\n\
                    lambda = np\nc0 = 0.2\nreplications = 7\nseed = 11\nsrc_method = sampled\n\
                    src_budget = 30\nsrc_rank = 9\ndesign = fixed\ncoefficients = fresh\n\
                    require_theorem2 = 0.9\n";
        let cfg = ExperimentConfig::from_kv(text).unwrap();
        assert_eq!(ExperimentConfig::from_kv(&cfg.to_kv()).unwrap(), cfg);
        let plain = ExperimentConfig::new(10, 10, 1);
        assert_eq!(ExperimentConfig::from_kv(&plain.to_kv()).unwrap(), plain);
    }

    #[test]
    fn bounds_config_example() {
        let cfg = BoundsConfig::from_kv("q = 3\nc_lower = 1\nc_upper = 2\nn = 100\nlambda = 10\n").unwrap();
        let b = cfg.evaluate().unwrap();
        assert_eq!(b.m1_star, Some(10.0));
        assert_abs_diff_eq!(b.q_hat_bound, 30.0, epsilon = 1e-12);

        let np = BoundsConfig::from_kv("q = 1\nc_lower = 1\nc_upper = 1\nn = 100\nlambda = np\np = 50\n").unwrap();
        let b = np.evaluate().unwrap();
        assert_abs_diff_eq!(b.lambda, b.lambda_np.unwrap(), epsilon = 1e-12);
        assert!(BoundsConfig::from_kv("q = 1\nc_lower = 1\nc_upper = 1\nn = 100\nlambda = np\n").is_err());
    }

    #[test]
    fn wishart_config() {
        let cfg = WishartConfig::from_kv("m = 10\nn = 200\ntau_lower = 0.16\ntau_upper = 2.56\n").unwrap();
        assert_eq!(cfg.replications, 500);
        assert!(WishartConfig::from_kv("m = 10\nn = 200\ntau_lower = 0.16").is_err());
    }
}
