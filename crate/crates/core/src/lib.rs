//! LASSO with KKT certificates, sparse Riesz certification of designs,
//! explicit selection bounds and Monte-Carlo checks of those bounds.
//!
//! Column indices are 0-based everywhere. The LASSO objective is
//! `‖y − Xb‖²/2 + λ‖b‖₁` with no `1/n` factor, and designs are
//! standardized to `‖x_j‖² = n`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod certify;
pub mod design;
pub mod diagnostics;
pub mod error;
pub mod lasso;
pub mod linalg;
pub mod serde_util;
pub mod sim;

pub use bounds::{
    invariant_ratios, lambda_np, lambda_star, m_star_constants, noise_tail_ratio, prop2_probability,
    success_probability, theorem3_failure_bound, theorem_bounds, MStar, NoiseModel, Prop2Bound, Prop2Epsilons,
    Ratios, SparsityBudget, TheoryBounds,
};
pub use certify::{
    gersgorin_certificate, irrepresentable_check, sampled_extremes, sparse_extremes_exact, Alpha, AlphaBound,
    CertMethod, GersgorinOutcome, IrrepresentableDiagnostic, SrcCertificate, DEFAULT_ALPHA_GRID,
    DEFAULT_ENUMERATION_BUDGET,
};
pub use design::{load_design, load_vector, parse_design, parse_vector, DesignMatrix, SubsetGram};
pub use diagnostics::{
    missing_coefficients, selected_model_bias, sparsity_profile, theorem_verdicts, Exponent, Losses,
    SelectionDiagnostics, SparsityProfile, Verdicts, ZetaMap, DEFAULT_ETA2_BUDGET,
};
pub use error::{Error, Result};
pub use lasso::{
    kkt_report, lambda_max, objective, path_csv, solve_lasso, solve_lasso_traced, solve_lasso_warm, solve_path,
    KktReport, LassoSolution, DEFAULT_MAX_SWEEPS, DEFAULT_TOL,
};
