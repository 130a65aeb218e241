//! Monte-Carlo replications of a LASSO selection experiment.

use std::fmt::Write as _;

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{CoefficientMode, DesignMode, ExperimentConfig, LambdaRule, MagnitudeRule, SrcMethod};
use super::generate::{stream_rng, CoefficientLayout, CovarianceModel};
use crate::bounds::{lambda_np_quiet, noise_tail_ratio, success_probability, theorem_bounds, TheoryBounds, TAIL_RATIO_WARNING};
use crate::certify::{gersgorin_certificate, sampled_extremes, sparse_extremes_exact, DEFAULT_ALPHA_GRID};
use crate::design::DesignMatrix;
use crate::diagnostics::{
    missing_coefficients, selected_model_bias, sparsity_profile, theorem_verdicts, Exponent, SelectionDiagnostics,
    SparsityProfile,
};
use crate::error::{Error, Result};
use crate::lasso::{lambda_max, solve_lasso, solve_path};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

// Per-replication streams are `STREAMS_PER_REP * index + offset`; shared
// draws use streams counted down from the top of the range.
const STREAMS_PER_REP: u64 = 4;
const DESIGN_STREAM: u64 = 0;
const COEF_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;
const CERT_STREAM: u64 = 3;
const SHARED_DESIGN_STREAM: u64 = u64::MAX;
const SHARED_COEF_STREAM: u64 = u64::MAX - 1;
const SHARED_CERT_STREAM: u64 = u64::MAX - 2;

fn rep_stream(index: usize, offset: u64) -> u64 {
    STREAMS_PER_REP * index as u64 + offset
}

/// Sparse eigenvalue pair actually used by one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrcInfo {
    pub c_lower: f64,
    pub c_upper: f64,
    /// False when the population bounds stood in.
    pub certified: bool,
    pub method: String,
    pub rank: Option<usize>,
    pub delta: Option<f64>,
    /// Why certification fell back to the population bounds.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub index: usize,
    pub lambda: f64,
    pub magnitude: f64,
    pub src: SrcInfo,
    pub kkt_satisfied: bool,
    pub bounds: TheoryBounds,
    pub diagnostics: SelectionDiagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequencies {
    pub q_tilde: f64,
    pub bias: f64,
    pub zeta2: f64,
    pub theorem2: f64,
    pub support_recovered: f64,
    pub kkt_satisfied: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub q10: f64,
    pub q50: f64,
    pub q90: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self {
            mean,
            std: var.sqrt(),
            q10: quantile(&sorted, 0.1),
            q50: quantile(&sorted, 0.5),
            q90: quantile(&sorted, 0.9),
        }
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], prob: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = prob * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSummaries {
    pub prediction: Summary,
    pub l1: Summary,
    pub l2: Summary,
    pub linf: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrcSummary {
    pub method: String,
    pub rank: Option<usize>,
    pub population_lower: f64,
    pub population_upper: f64,
    pub mean_c_lower: f64,
    pub mean_c_upper: f64,
    pub min_c_lower: f64,
    pub max_c_upper: f64,
    pub certified_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathRow {
    pub lambda: f64,
    pub q_hat: usize,
    pub bias: f64,
    pub zeta2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub tool_version: String,
    pub master_seed: u64,
    pub config: ExperimentConfig,
    /// The configuration in file form; feeding it back reproduces this report.
    pub config_text: String,
    pub src: SrcSummary,
    pub frequencies: Frequencies,
    pub success_prob: Option<f64>,
    pub losses: LossSummaries,
    pub mean_lambda: f64,
    pub replications: Vec<ReplicationRecord>,
    /// Penalty path of replication 0.
    pub path: Vec<PathRow>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Spec(format!("cannot serialize report: {e}")))
    }

    /// One row per replication.
    pub fn replications_csv(&self) -> String {
        let mut s = String::from(
            "index,lambda,magnitude,c_lower,c_upper,certified,q_hat,q_tilde,bias,zeta0,zeta2,\
             support_recovered,verdict_q_tilde,verdict_bias,verdict_zeta2,verdict_theorem2,\
             prediction_loss,l1_loss,l2_loss,linf_loss,kkt_satisfied\n",
        );
        for r in &self.replications {
            let d = &r.diagnostics;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.index,
                r.lambda,
                r.magnitude,
                r.src.c_lower,
                r.src.c_upper,
                r.src.certified,
                d.q_hat,
                d.q_tilde,
                d.bias,
                d.zeta["0"],
                d.zeta["2"],
                d.support_recovered,
                d.verdicts.q_tilde,
                d.verdicts.bias,
                d.verdicts.zeta2,
                d.verdicts.theorem2,
                d.losses.prediction,
                d.losses.l1,
                d.losses.l2,
                d.losses.linf,
                r.kkt_satisfied,
            );
        }
        s
    }

    pub fn path_csv(&self) -> String {
        let mut s = String::from("lambda,q_hat,bias,zeta2\n");
        for row in &self.path {
            let _ = writeln!(s, "{},{},{},{}", row.lambda, row.q_hat, row.bias, row.zeta2);
        }
        s
    }

    /// Frequencies below the configured minimums, as readable messages.
    pub fn requirement_failures(&self) -> Vec<String> {
        let r = &self.config.requirements;
        let f = &self.frequencies;
        [
            ("q_tilde", r.q_tilde, f.q_tilde),
            ("bias", r.bias, f.bias),
            ("zeta2", r.zeta2, f.zeta2),
            ("theorem2", r.theorem2, f.theorem2),
            ("support", r.support, f.support_recovered),
        ]
        .into_iter()
        .filter_map(|(name, need, got)| {
            need.filter(|need| got < *need)
                .map(|need| format!("{name} frequency {got} is below the required {need}"))
        })
        .collect()
    }
}

/// Everything a replication draws before solving.
#[derive(Debug, Clone)]
pub struct ReplicationData {
    pub index: usize,
    pub design: DesignMatrix,
    pub src: SrcInfo,
    pub beta: Vec<f64>,
    pub y: Vec<f64>,
    pub lambda: f64,
    pub magnitude: f64,
    pub profile: SparsityProfile,
    pub bounds: TheoryBounds,
}

/// Shared state resolved once per experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    model: CovarianceModel,
    rank: usize,
    fixed_design: Option<(DesignMatrix, SrcInfo)>,
    fixed_layout: Option<CoefficientLayout>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        if matches!(config.magnitude, MagnitudeRule::ThresholdMultiple(_)) && config.q == 0 {
            return Err(Error::Config {
                key: "magnitude_threshold_multiple".into(),
                message: "needs q >= 1".into(),
            });
        }
        let model = CovarianceModel::new(&config.covariance, config.p)?;
        let rank = config.src_rank.unwrap_or_else(|| default_rank(&config, &model));
        if let LambdaRule::Np { c0, a_n } = config.lambda {
            let tail = noise_tail_ratio(config.p, a_n, c0);
            if tail > TAIL_RATIO_WARNING {
                log::warn!("p / (p ∨ a_n)^(1+c0) = {tail:.3} is not small; the penalty floor is optimistic");
            }
        }
        let mut exp = Self {
            config,
            model,
            rank,
            fixed_design: None,
            fixed_layout: None,
        };
        if exp.config.design == DesignMode::Fixed {
            let x = exp.draw_design(SHARED_DESIGN_STREAM)?;
            let src = exp.certify(&x, SHARED_CERT_STREAM);
            exp.fixed_design = Some((x, src));
        }
        if exp.config.coefficients == CoefficientMode::Fixed {
            exp.fixed_layout = Some(exp.draw_layout(SHARED_COEF_STREAM)?);
        }
        Ok(exp)
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn model(&self) -> &CovarianceModel {
        &self.model
    }

    fn draw_design(&self, stream: u64) -> Result<DesignMatrix> {
        let x = self.model.sample(self.config.n, &mut stream_rng(self.config.master_seed, stream))?;
        if self.config.standardize {
            x.standardize_columns()
        } else {
            Ok(x)
        }
    }

    fn draw_layout(&self, stream: u64) -> Result<CoefficientLayout> {
        let c = &self.config;
        CoefficientLayout::draw(
            c.p,
            c.q,
            c.eta1,
            c.small_count,
            &mut stream_rng(c.master_seed, stream),
        )
    }

    fn population(&self, note: Option<String>) -> SrcInfo {
        SrcInfo {
            c_lower: self.model.rho_lower,
            c_upper: self.model.rho_upper,
            certified: false,
            method: "population".into(),
            rank: None,
            delta: None,
            note,
        }
    }

    fn certify(&self, x: &DesignMatrix, stream: u64) -> SrcInfo {
        let m = self.rank;
        let outcome = match self.config.src_method {
            SrcMethod::Population => return self.population(None),
            SrcMethod::Exact { budget } => sparse_extremes_exact(x, m, budget as u128).map(Some),
            SrcMethod::Gersgorin { budget } => {
                gersgorin_certificate(x, m, &DEFAULT_ALPHA_GRID, budget as u128).map(|g| {
                    if g.certificate.is_none() {
                        log::debug!("Geršgorin δ = {} at rank {m}", g.delta);
                    }
                    g.certificate
                })
            }
            SrcMethod::Sampled { budget } => {
                let seed = stream_rng(self.config.master_seed, stream).next_u64();
                sampled_extremes(x, m, budget, seed).map(Some)
            }
        };
        match outcome {
            Ok(Some(cert)) if cert.c_lower > 0.0 => SrcInfo {
                c_lower: cert.c_lower,
                c_upper: cert.c_upper,
                certified: true,
                method: cert.method.to_string(),
                rank: Some(cert.rank),
                delta: cert.delta,
                note: None,
            },
            Ok(Some(_)) => self.population(Some(format!("lower sparse eigenvalue is zero at rank {m}"))),
            Ok(None) => self.population(Some(format!("no Geršgorin certificate at rank {m}"))),
            Err(e) => self.population(Some(e.to_string())),
        }
    }

    /// Draws design, coefficients and response for replication `index`.
    pub fn replication_data(&self, index: usize) -> Result<ReplicationData> {
        let c = &self.config;
        let (design, src) = match &self.fixed_design {
            Some((x, src)) => (x.clone(), src.clone()),
            None => {
                let x = self.draw_design(rep_stream(index, DESIGN_STREAM))?;
                let src = self.certify(&x, rep_stream(index, CERT_STREAM));
                (x, src)
            }
        };
        let lambda = match c.lambda {
            LambdaRule::Fixed { value } => value,
            LambdaRule::Np { c0, a_n } => lambda_np_quiet(c.sigma, c0, a_n, src.c_upper, c.n, c.p)?,
        };
        let layout = match &self.fixed_layout {
            Some(l) => l.clone(),
            None => self.draw_layout(rep_stream(index, COEF_STREAM))?,
        };
        let budget = c.eta2_budget as u128;
        let magnitude = match c.magnitude {
            MagnitudeRule::Fixed(m) => m,
            MagnitudeRule::ThresholdMultiple(k) => {
                let small = sparsity_profile(&design, &layout.small_part(), 0, budget)?;
                let mut pre = small.budget();
                pre.q = c.q;
                let b = theorem_bounds(&pre, src.c_lower, src.c_upper, lambda, c.n)?;
                k * b.theorem2_threshold.sqrt()
            }
        };
        let beta = layout.materialize(magnitude);
        let profile = sparsity_profile(&design, &beta, c.q, budget)?;
        let mut bounds = theorem_bounds(&profile.budget(), src.c_lower, src.c_upper, lambda, c.n)?;
        if src.certified {
            bounds = bounds.with_rank(self.rank)?;
        }
        if let LambdaRule::Np { c0, a_n } = c.lambda {
            bounds.lambda_np = Some(lambda_np_quiet(c.sigma, c0, a_n, src.c_upper, c.n, c.p)?);
            bounds.success_prob = Some(success_probability(c.p, a_n, c0));
        }

        let mut rng = stream_rng(c.master_seed, rep_stream(index, NOISE_STREAM));
        let mean = design.mul_vec(&beta);
        let y: Vec<f64> = mean
            .iter()
            .map(|m| {
                let z: f64 = StandardNormal.sample(&mut rng);
                m + c.sigma * z
            })
            .collect();
        Ok(ReplicationData {
            index,
            design,
            src,
            beta,
            y,
            lambda,
            magnitude,
            profile,
            bounds,
        })
    }

    /// Solves and diagnoses replication `index`.
    pub fn run_replication(&self, index: usize) -> Result<ReplicationRecord> {
        let wrap = |e: Error| Error::Replication {
            index,
            source: Box::new(e),
        };
        let d = self.replication_data(index).map_err(wrap)?;
        let sol = solve_lasso(&d.design, &d.y, d.lambda, self.config.tol, self.config.max_sweeps).map_err(wrap)?;
        let diagnostics = theorem_verdicts(&d.design, &d.beta, &d.profile, &sol, &d.bounds).map_err(wrap)?;
        Ok(ReplicationRecord {
            index,
            lambda: d.lambda,
            magnitude: d.magnitude,
            src: d.src,
            kkt_satisfied: sol.kkt.satisfied,
            bounds: d.bounds,
            diagnostics,
        })
    }

    /// `(λ, q̂, B̃, ζ₂)` along a geometric grid for replication `index`.
    pub fn path_rows(&self, index: usize) -> Result<Vec<PathRow>> {
        let points = self.config.path_points;
        if points == 0 {
            return Ok(Vec::new());
        }
        let wrap = |e: Error| Error::Replication {
            index,
            source: Box::new(e),
        };
        let d = self.replication_data(index).map_err(wrap)?;
        let bottom = d.lambda * self.config.path_ratio;
        let top = lambda_max(&d.design, &d.y).max(d.lambda);
        let ratio = (bottom / top).ln() / (points - 1) as f64;
        let grid: Vec<f64> = (0..points).map(|k| top * (ratio * k as f64).exp()).collect();
        let path = solve_path(&d.design, &d.y, &grid, self.config.tol, self.config.max_sweeps).map_err(wrap)?;
        path.iter()
            .map(|sol| {
                let bias = selected_model_bias(&d.design, &d.beta, &sol.selected)?;
                let zeta = missing_coefficients(&d.beta, &d.profile.a0, &sol.selected, &[Exponent::Finite(2.0)]);
                Ok(PathRow {
                    lambda: sol.lambda,
                    q_hat: sol.q_hat,
                    bias,
                    zeta2: zeta["2"],
                })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(wrap)
    }

    /// Runs every replication on the current rayon pool and aggregates.
    pub fn run(&self) -> Result<ExperimentReport> {
        let outcomes: Vec<Result<ReplicationRecord>> = (0..self.config.replications)
            .into_par_iter()
            .map(|i| self.run_replication(i))
            .collect();
        let records = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
        let path = self.path_rows(0)?;
        Ok(self.aggregate(records, path))
    }

    fn aggregate(&self, records: Vec<ReplicationRecord>, path: Vec<PathRow>) -> ExperimentReport {
        let c = &self.config;
        let n = records.len() as f64;
        let freq = |f: &dyn Fn(&ReplicationRecord) -> bool| records.iter().filter(|r| f(r)).count() as f64 / n;
        let frequencies = Frequencies {
            q_tilde: freq(&|r| r.diagnostics.verdicts.q_tilde),
            bias: freq(&|r| r.diagnostics.verdicts.bias),
            zeta2: freq(&|r| r.diagnostics.verdicts.zeta2),
            theorem2: freq(&|r| r.diagnostics.verdicts.theorem2),
            support_recovered: freq(&|r| r.diagnostics.support_recovered),
            kkt_satisfied: freq(&|r| r.kkt_satisfied),
        };
        let column = |f: &dyn Fn(&ReplicationRecord) -> f64| records.iter().map(f).collect::<Vec<f64>>();
        let losses = LossSummaries {
            prediction: Summary::of(&column(&|r| r.diagnostics.losses.prediction)),
            l1: Summary::of(&column(&|r| r.diagnostics.losses.l1)),
            l2: Summary::of(&column(&|r| r.diagnostics.losses.l2)),
            linf: Summary::of(&column(&|r| r.diagnostics.losses.linf)),
        };
        let lowers = column(&|r| r.src.c_lower);
        let uppers = column(&|r| r.src.c_upper);
        let method = match c.src_method {
            SrcMethod::Exact { .. } => "exact",
            SrcMethod::Gersgorin { .. } => "gersgorin",
            SrcMethod::Sampled { .. } => "sampled",
            SrcMethod::Population => "population",
        };
        let src = SrcSummary {
            method: method.into(),
            rank: (c.src_method != SrcMethod::Population).then_some(self.rank),
            population_lower: self.model.rho_lower,
            population_upper: self.model.rho_upper,
            mean_c_lower: lowers.iter().sum::<f64>() / n,
            mean_c_upper: uppers.iter().sum::<f64>() / n,
            min_c_lower: lowers.iter().copied().fold(f64::INFINITY, f64::min),
            max_c_upper: uppers.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            certified_fraction: freq(&|r| r.src.certified),
        };
        let success_prob = match c.lambda {
            LambdaRule::Np { c0, a_n } => Some(success_probability(c.p, a_n, c0)),
            LambdaRule::Fixed { .. } => None,
        };
        ExperimentReport {
            tool_version: TOOL_VERSION.into(),
            master_seed: c.master_seed,
            config: c.clone(),
            config_text: c.to_kv(),
            src,
            frequencies,
            success_prob,
            losses,
            mean_lambda: column(&|r| r.lambda).iter().sum::<f64>() / n,
            replications: records,
            path,
        }
    }
}

/// `(2 + 4C)q + 1` with the population `C`, capped at `min(n, p)`.
fn default_rank(config: &ExperimentConfig, model: &CovarianceModel) -> usize {
    let c = model.rho_upper / model.rho_lower;
    let want = ((2.0 + 4.0 * c) * config.q as f64 + 1.0).ceil() as usize;
    want.clamp(1, config.n.min(config.p).max(1))
}

/// Runs `config` on the global rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    Experiment::new(config.clone())?.run()
}

/// Runs `config` with at most `threads` workers; the report does not depend
/// on the count.
pub fn run_experiment_with_threads(config: &ExperimentConfig, threads: usize) -> Result<ExperimentReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Spec(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_experiment(config))
}
