//! Synthetic data generation and Monte-Carlo experiments.

pub mod config;
pub mod experiment;
pub mod generate;
pub mod wishart;

pub use config::{
    BoundsConfig, CoefficientMode, DesignMode, ExperimentConfig, KeyValues, LambdaRule, MagnitudeRule, Requirements,
    SrcMethod, WishartConfig,
};
pub use experiment::{
    run_experiment, run_experiment_with_threads, Experiment, ExperimentReport, Frequencies, LossSummaries, PathRow,
    ReplicationData, ReplicationRecord, SrcInfo, SrcSummary, Summary, TOOL_VERSION,
};
pub use generate::{
    gen_coefficients, gen_gaussian_design, stream_rng, CoefficientLayout, CovarianceModel, CovarianceSpec,
    GeneratedDesign,
};
pub use wishart::{wishart_extreme_trials, ExtremeSummary, WishartSummary};
