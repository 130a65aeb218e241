use thiserror::Error;

use crate::lasso::LassoSolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("empty input")]
    EmptyInput,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("non-numeric cell at row {row}, column {column}: {value:?}")]
    ParseCell {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("column {0} is identically zero")]
    DegenerateColumn(usize),

    #[error("index error: {0}")]
    Index(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("enumeration budget exceeded: {count} subsets required, budget is {budget}")]
    Budget { count: u128, budget: u128 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singular matrix: smallest eigenvalue {min_eigenvalue:e}")]
    Singular { min_eigenvalue: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no KKT point reached after {sweeps} sweeps (active residual {:e}, inactive excess {:e})",
        .best.kkt.active_residual, .best.kkt.inactive_excess)]
    NonConvergence {
        sweeps: usize,
        best: Box<LassoSolution>,
    },

    #[error("path failed at grid index {index}: {source}")]
    Path {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("replication {index} failed: {source}")]
    Replication {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid specification: {0}")]
    Spec(String),

    #[error("config error for key {key:?}: {message}")]
    Config { key: String, message: String },
}
