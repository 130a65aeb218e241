#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use riesz_lasso::sim::{self, BoundsConfig, ExperimentConfig, WishartConfig, TOOL_VERSION};
use riesz_lasso::{
    gersgorin_certificate, lambda_max, load_design, load_vector, sampled_extremes, solve_lasso_warm,
    sparse_extremes_exact, Error, GersgorinOutcome, LassoSolution, SrcCertificate, TheoryBounds, DEFAULT_ALPHA_GRID,
    DEFAULT_ENUMERATION_BUDGET, DEFAULT_MAX_SWEEPS, DEFAULT_TOL,
};

const EXIT_IO: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_NO_CERTIFICATE: u8 = 3;
const EXIT_NOT_CONVERGED: u8 = 4;
const EXIT_REQUIREMENT: u8 = 5;

#[derive(Parser)]
#[command(name = "riesz-lasso", version, about = "Certified LASSO fits, sparse Riesz certificates and selection bounds")]
struct Cli {
    /// Directory receiving JSON and CSV outputs.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Gersgorin,
    Sampled,
}

#[derive(Subcommand)]
enum Command {
    /// Bound the sparse eigenvalues of a design at one rank.
    Certify {
        design: PathBuf,
        #[arg(long)]
        rank: usize,
        #[arg(long, value_enum, default_value = "exact")]
        method: Method,
        /// Subset budget (exact, gersgorin) or evaluation budget (sampled).
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// The CSV starts with a header row.
        #[arg(long)]
        header: bool,
    },
    /// Solve the LASSO at one penalty.
    Solve {
        design: PathBuf,
        response: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve along a decreasing penalty grid with warm starts.
    Path {
        design: PathBuf,
        response: PathBuf,
        /// Comma-separated penalties, or `auto:K` for K geometric points below ‖X'y‖∞.
        #[arg(long)]
        grid: String,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Evaluate every explicit bound from a config file.
    Bounds { config: PathBuf },
    /// Run a Monte-Carlo selection experiment.
    Simulate {
        config: PathBuf,
        /// Worker thread cap; results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Extreme eigenvalues of Gaussian sample covariances.
    Wishart {
        config: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(clap::Args)]
struct SolverArgs {
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
    max_sweeps: usize,
    #[arg(long)]
    header: bool,
    /// Rescale design columns to ‖x_j‖² = n before solving.
    #[arg(long)]
    standardize: bool,
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(dir, name, &text)
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn read_config(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

#[derive(Serialize)]
struct CertifyOutput<'a> {
    tool_version: &'a str,
    seed: u64,
    design: String,
    rank: usize,
    method: &'a str,
    budget: u64,
    certificate: Option<SrcCertificate>,
    gersgorin: Option<GersgorinOutcome>,
}

fn certify(
    out: &Path,
    design: &Path,
    rank: usize,
    method: Method,
    budget: Option<u64>,
    seed: u64,
    header: bool,
) -> Result<u8> {
    let x = load_design(design, header)?.standardize_columns()?;
    let (name, budget) = match method {
        Method::Exact => ("exact", budget.unwrap_or(DEFAULT_ENUMERATION_BUDGET as u64)),
        Method::Gersgorin => ("gersgorin", budget.unwrap_or(DEFAULT_ENUMERATION_BUDGET as u64)),
        Method::Sampled => ("sampled", budget.unwrap_or(1000)),
    };
    let mut output = CertifyOutput {
        tool_version: TOOL_VERSION,
        seed,
        design: design.display().to_string(),
        rank,
        method: name,
        budget,
        certificate: None,
        gersgorin: None,
    };
    let mut code = 0;
    match method {
        Method::Exact => output.certificate = Some(sparse_extremes_exact(&x, rank, budget as u128)?),
        Method::Sampled => {
            let budget = usize::try_from(budget).context("budget does not fit in memory")?;
            output.certificate = Some(sampled_extremes(&x, rank, budget, seed)?);
        }
        Method::Gersgorin => {
            let g = gersgorin_certificate(&x, rank, &DEFAULT_ALPHA_GRID, budget as u128)?;
            if g.certificate.is_none() {
                eprintln!("no certificate: delta = {} is not below 1", g.delta);
                code = EXIT_NO_CERTIFICATE;
            }
            output.certificate = g.certificate.clone();
            output.gersgorin = Some(g);
        }
    }
    write_json(out, "certificate.json", &output)?;
    Ok(code)
}

fn load_problem(design: &Path, response: &Path, args: &SolverArgs) -> Result<(riesz_lasso::DesignMatrix, Vec<f64>)> {
    let mut x = load_design(design, args.header)?;
    if args.standardize {
        x = x.standardize_columns()?;
    }
    let y = load_vector(response, args.header)?;
    if y.len() != x.n() {
        bail!("response has {} entries but the design has {} rows", y.len(), x.n());
    }
    Ok((x, y))
}

/// Solves at `lambda`; a non-converged run yields its best iterate.
fn solve_one(
    x: &riesz_lasso::DesignMatrix,
    y: &[f64],
    lambda: f64,
    args: &SolverArgs,
    init: &[f64],
) -> Result<(LassoSolution, bool)> {
    match solve_lasso_warm(x, y, lambda, args.tol, args.max_sweeps, init) {
        Ok(sol) => Ok((sol, true)),
        Err(Error::NonConvergence { sweeps, best }) => {
            eprintln!("no convergence at lambda = {lambda} after {sweeps} sweeps");
            Ok((*best, false))
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct SolveOutput<'a, T: Serialize> {
    tool_version: &'a str,
    design: String,
    response: String,
    tol: f64,
    max_sweeps: usize,
    standardized: bool,
    converged: bool,
    solution: T,
}

fn solve_and_write<T: Serialize>(
    out: &Path,
    design: &Path,
    response: &Path,
    args: &SolverArgs,
    converged: bool,
    solution: T,
    name: &str,
) -> Result<()> {
    write_json(
        out,
        name,
        &SolveOutput {
            tool_version: TOOL_VERSION,
            design: design.display().to_string(),
            response: response.display().to_string(),
            tol: args.tol,
            max_sweeps: args.max_sweeps,
            standardized: args.standardize,
            converged,
            solution,
        },
    )
}

fn exit_for(converged: bool, solutions: &[LassoSolution]) -> u8 {
    if converged && solutions.iter().all(|s| s.kkt.satisfied) {
        0
    } else {
        EXIT_NOT_CONVERGED
    }
}

fn solve(out: &Path, design: &Path, response: &Path, lambda: f64, args: &SolverArgs) -> Result<u8> {
    let (x, y) = load_problem(design, response, args)?;
    let (sol, converged) = solve_one(&x, &y, lambda, args, &vec![0.0; x.p()])?;
    let sols = [sol];
    write_file(out, "path.csv", &riesz_lasso::path_csv(&sols))?;
    solve_and_write(out, design, response, args, converged, &sols[0], "solution.json")?;
    Ok(exit_for(converged, &sols))
}

fn parse_grid(spec: &str, top: f64) -> Result<Vec<f64>> {
    if let Some(k) = spec.strip_prefix("auto:") {
        let k: usize = k.trim().parse().context("auto grid needs a point count")?;
        if k < 2 {
            bail!("auto grid needs at least 2 points");
        }
        if !(top > 0.0) {
            bail!("response is orthogonal to every column; no grid below zero");
        }
        let ratio: f64 = 0.01f64.ln() / (k - 1) as f64;
        return Ok((0..k).map(|i| top * (ratio * i as f64).exp()).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad grid value {s:?}")))
        .collect()
}

fn path(out: &Path, design: &Path, response: &Path, grid: &str, args: &SolverArgs) -> Result<u8> {
    let (x, y) = load_problem(design, response, args)?;
    let grid = parse_grid(grid, lambda_max(&x, &y))?;
    if grid.iter().any(|l| !(*l >= 0.0)) || grid.windows(2).any(|w| w[1] >= w[0]) {
        bail!("grid must be non-negative and strictly decreasing");
    }
    let mut sols: Vec<LassoSolution> = Vec::with_capacity(grid.len());
    let mut converged = true;
    for &lambda in &grid {
        let init = sols.last().map_or_else(|| vec![0.0; x.p()], |s| s.beta_hat.clone());
        let (sol, ok) = solve_one(&x, &y, lambda, args, &init)?;
        converged &= ok;
        sols.push(sol);
    }
    write_file(out, "path.csv", &riesz_lasso::path_csv(&sols))?;
    solve_and_write(out, design, response, args, converged, &sols, "path.json")?;
    Ok(exit_for(converged, &sols))
}

#[derive(Serialize)]
struct BoundsOutput<'a> {
    tool_version: &'a str,
    seed: Option<u64>,
    config: BoundsConfig,
    bounds: TheoryBounds,
}

fn bounds(out: &Path, config: &Path) -> Result<u8> {
    let cfg = BoundsConfig::from_kv(&read_config(config)?)?;
    let bounds = cfg.evaluate()?;
    write_json(
        out,
        "bounds.json",
        &BoundsOutput {
            tool_version: TOOL_VERSION,
            seed: None,
            config: cfg,
            bounds,
        },
    )?;
    Ok(0)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build()?;
            Ok(pool.install(f))
        }
    }
}

fn simulate(out: &Path, config: &Path, threads: Option<usize>) -> Result<u8> {
    let cfg = ExperimentConfig::from_kv(&read_config(config)?)?;
    let report = with_threads(threads, || sim::run_experiment(&cfg))??;
    write_file(out, "report.json", &(report.to_json()? + "\n"))?;
    write_file(out, "replications.csv", &report.replications_csv())?;
    write_file(out, "path.csv", &report.path_csv())?;
    let failures = report.requirement_failures();
    for f in &failures {
        eprintln!("{f}");
    }
    Ok(if failures.is_empty() { 0 } else { EXIT_REQUIREMENT })
}

#[derive(Serialize)]
struct WishartOutput<'a> {
    tool_version: &'a str,
    seed: u64,
    config: WishartConfig,
    summary: sim::WishartSummary,
}

fn wishart(out: &Path, config: &Path, threads: Option<usize>) -> Result<u8> {
    let cfg = WishartConfig::from_kv(&read_config(config)?)?;
    let summary = with_threads(threads, || {
        sim::wishart_extreme_trials(cfg.m, cfg.n, cfg.replications, cfg.seed, cfg.tau_lower, cfg.tau_upper)
    })??;
    let mut code = 0;
    if let Some(need) = cfg.require_freq {
        if summary.freq_within < need {
            eprintln!("event frequency {} is below the required {need}", summary.freq_within);
            code = EXIT_REQUIREMENT;
        }
    }
    write_json(
        out,
        "wishart.json",
        &WishartOutput {
            tool_version: TOOL_VERSION,
            seed: cfg.seed,
            config: cfg,
            summary,
        },
    )?;
    Ok(code)
}

fn run(cli: Cli) -> Result<u8> {
    let out = cli.out.as_path();
    match cli.command {
        Command::Certify {
            design,
            rank,
            method,
            budget,
            seed,
            header,
        } => certify(out, &design, rank, method, budget, seed, header),
        Command::Solve {
            design,
            response,
            lambda,
            solver,
        } => solve(out, &design, &response, lambda, &solver),
        Command::Path {
            design,
            response,
            grid,
            solver,
        } => path(out, &design, &response, &grid, &solver),
        Command::Bounds { config } => bounds(out, &config),
        Command::Simulate { config, threads } => simulate(out, &config, threads),
        Command::Wishart { config, threads } => wishart(out, &config, threads),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<Error>() {
                Some(Error::Budget { .. }) => EXIT_BUDGET,
                _ => EXIT_IO,
            };
            ExitCode::from(code)
        }
    }
}
