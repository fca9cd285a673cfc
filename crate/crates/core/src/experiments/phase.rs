use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{phi, sample_bound, BoundQuery};
use crate::error::{Error, Result};
use crate::linalg::gaussian_matrix;
use crate::rng::derive_seed;
use crate::signals::{rel_err, sparsity_levels, synth_signal, DEFAULT_SPARSITY_TOL};
use crate::solvers::{admm_constrained, AdmmConfig, RegParams};

use super::Table;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhaseConfig {
    pub n: usize,
    pub s_r: usize,
    pub blocks: usize,
    /// Sampling ratios `m/n`.
    pub ratios: Vec<f64>,
    pub trials: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    /// A trial succeeds when RelErr is below this.
    pub success_tol: f64,
    /// Deviation parameter of the bound column.
    pub t: f64,
    pub admm: AdmmConfig,
    pub seed: u64,
}

impl Default for PhaseConfig {
    fn default() -> Self {
        Self {
            n: 200,
            s_r: 40,
            blocks: 3,
            ratios: (1..=10).map(|k| k as f64 / 10.0).collect(),
            trials: 20,
            lambda1: 1e-3,
            lambda2: 1.0,
            success_tol: 1e-3,
            t: 1.0,
            admm: AdmmConfig {
                record_history: false,
                ..Default::default()
            },
            seed: 0,
        }
    }
}

/// Success fraction of noiseless ADMM recovery per sampling ratio.
///
/// Trial `j` uses the same signal at every ratio, and its sensing matrices
/// share a seed, so the rows at a larger ratio extend those at a smaller
/// one. The `m_bound` column is the sample count implied by `Φ` at the
/// largest gradient sparsity seen across the trials.
pub fn phase(cfg: &PhaseConfig) -> Result<Table> {
    if cfg.trials == 0 || cfg.ratios.is_empty() {
        return Err(Error::Config("need at least one trial and one ratio".into()));
    }
    if let Some(r) = cfg.ratios.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
        return Err(Error::Config(format!("sampling ratios must lie in (0, 1], got {r}")));
    }
    let reg = RegParams::new(cfg.lambda1, cfg.lambda2)?;

    let signals: Vec<Vec<f64>> = (0..cfg.trials)
        .map(|j| synth_signal(cfg.n, cfg.s_r, cfg.blocks, derive_seed(cfg.seed, 2 * j as u64)).map(|s| s.values))
        .collect::<Result<_>>()?;
    let mut s_g_max = 0;
    for x in &signals {
        s_g_max = s_g_max.max(sparsity_levels(x, DEFAULT_SPARSITY_TOL)?.1);
    }
    let q = BoundQuery::new(cfg.n, cfg.s_r, s_g_max, cfg.lambda1, cfg.lambda2, cfg.t)?;
    let m_bound = sample_bound(phi(&q)?, cfg.t)?;

    let mut table = Table::new(&[
        "ratio",
        "m",
        "trials",
        "successes",
        "success_fraction",
        "mean_rel_err",
        "m_bound",
        "bound_ratio",
    ]);
    for &ratio in &cfg.ratios {
        let m = ((ratio * cfg.n as f64).round() as usize).max(1);
        let errs: Vec<f64> = (0..cfg.trials)
            .into_par_iter()
            .map(|j| {
                let a = gaussian_matrix(m, cfg.n, derive_seed(cfg.seed, 2 * j as u64 + 1))?;
                let y = a.matvec(&signals[j]);
                let r = admm_constrained(&a, &y, &reg, &cfg.admm)?;
                rel_err(&r.x, &signals[j])
            })
            .collect::<Result<_>>()?;
        let successes = errs.iter().filter(|&&e| e < cfg.success_tol).count();
        table.push(vec![
            ratio.into(),
            m.into(),
            cfg.trials.into(),
            successes.into(),
            (successes as f64 / cfg.trials as f64).into(),
            (errs.iter().sum::<f64>() / cfg.trials as f64).into(),
            m_bound.into(),
            (m_bound as f64 / cfg.n as f64).into(),
        ]);
    }
    Ok(table)
}
