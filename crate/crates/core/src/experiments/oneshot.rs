use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::gaussian_matrix;
use crate::rng::derive_seed;
use crate::signals::{add_noise, rel_err, synth_signal};
use crate::solvers::{
    admm_constrained, default_step_params, pgm_ista, reference_solve, AdmmConfig, ReferenceConfig, RegParams,
    SensingProblem, SolveOptions,
};

use super::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// PGM-ISTA on the regularized model.
    #[default]
    Pgm,
    /// ADMM on the noiseless constrained model.
    Admm,
    /// Primal–dual reference solver on the regularized model.
    Reference,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pgm" => Ok(Method::Pgm),
            "admm" => Ok(Method::Admm),
            "reference" => Ok(Method::Reference),
            other => Err(Error::Usage(format!(
                "unknown method '{other}' (pgm, admm or reference)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    /// CSV file holding the signal.
    pub input: Option<String>,
    /// Column to read; the first one when unset.
    pub column: Option<String>,
    /// Sampling ratio `m/n`.
    pub ratio: f64,
    pub sigma: f64,
    pub method: Method,
    pub lambda1: f64,
    pub lambda2: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            input: None,
            column: None,
            ratio: 0.5,
            sigma: 0.0,
            method: Method::Pgm,
            lambda1: 0.01,
            lambda2: 0.01,
            max_iter: 10_000,
            tol: 1e-8,
            seed: 0,
        }
    }
}

/// What one solve reports besides the recovered signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub m: usize,
    pub rel_err: f64,
    pub iterations: usize,
    pub converged: bool,
    pub seconds: f64,
}

/// Measures `x` with a seeded Gaussian matrix (`m = round(ratio·n)`), adds
/// noise, and recovers it. The table has columns `truth` and `estimate`.
pub fn solve_signal(cfg: &SolveConfig, x: &[f64]) -> Result<(Table, SolveSummary)> {
    let n = x.len();
    if n < 2 {
        return Err(Error::Config("signal must have at least 2 entries".into()));
    }
    if !(cfg.ratio > 0.0 && cfg.ratio <= 1.0) {
        return Err(Error::Config(format!("ratio must lie in (0, 1], got {}", cfg.ratio)));
    }
    if cfg.method == Method::Admm && cfg.sigma != 0.0 {
        return Err(Error::Config(
            "ADMM solves the noiseless constrained model; use sigma = 0".into(),
        ));
    }
    let m = ((cfg.ratio * n as f64).round() as usize).max(1);
    let a = gaussian_matrix(m, n, derive_seed(cfg.seed, 0))?;
    let y = add_noise(&a.matvec(x), cfg.sigma, derive_seed(cfg.seed, 1))?;
    let reg = RegParams::new(cfg.lambda1, cfg.lambda2)?;
    let x0 = vec![0.0; n];

    let start = Instant::now();
    let result = match cfg.method {
        Method::Pgm => {
            let problem = SensingProblem::new(a, y)?;
            let steps = default_step_params(&problem, 0.5)?;
            let opts = SolveOptions {
                record_history: false,
                ..SolveOptions::new(cfg.max_iter, cfg.tol)
            };
            pgm_ista(&problem, &reg, &steps, &x0, &opts)?
        }
        Method::Admm => {
            let admm = AdmmConfig {
                tol: cfg.tol,
                max_iter: cfg.max_iter,
                record_history: false,
                ..Default::default()
            };
            admm_constrained(&a, &y, &reg, &admm)?
        }
        Method::Reference => {
            let problem = SensingProblem::new(a, y)?;
            let rc = ReferenceConfig {
                max_iter: cfg.max_iter,
                tol: cfg.tol,
                ..Default::default()
            };
            reference_solve(&problem, &reg, &x0, &rc)?
        }
    };
    let seconds = start.elapsed().as_secs_f64();

    let mut table = Table::new(&["truth", "estimate"]);
    for (t, e) in x.iter().zip(&result.x) {
        table.push(vec![(*t).into(), (*e).into()]);
    }
    let summary = SolveSummary {
        m,
        rel_err: rel_err(&result.x, x)?,
        iterations: result.iterations,
        converged: result.converged,
        seconds,
    };
    Ok((table, summary))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub n: usize,
    pub s_r: usize,
    pub blocks: usize,
    pub count: usize,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n: 200,
            s_r: 40,
            blocks: 3,
            count: 1,
            seed: 0,
        }
    }
}

/// `count` synthetic signals as columns `x0, x1, …`; signal `i` is
/// generated from child seed `i` of `seed`.
pub fn gen_signals(cfg: &GenConfig) -> Result<Table> {
    if cfg.count == 0 {
        return Err(Error::Config("count must be positive".into()));
    }
    let signals: Vec<Vec<f64>> = (0..cfg.count)
        .map(|i| synth_signal(cfg.n, cfg.s_r, cfg.blocks, derive_seed(cfg.seed, i as u64)).map(|s| s.values))
        .collect::<Result<_>>()?;
    let names: Vec<String> = (0..cfg.count).map(|i| format!("x{i}")).collect();
    let mut table = Table::new(&names.iter().map(String::as_str).collect::<Vec<_>>());
    for k in 0..cfg.n {
        table.push(signals.iter().map(|s| s[k].into()).collect());
    }
    Ok(table)
}
