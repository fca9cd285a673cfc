use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::gaussian_matrix;
use crate::rng::derive_seed;
use crate::signals::{add_noise, synth_signal};
use crate::solvers::{
    objective, pgm_ista, reference_solve, ReferenceConfig, RegParams, SensingProblem, SolveOptions, StepParams,
};

use super::Table;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UtSweepConfig {
    pub n: usize,
    pub m: usize,
    pub s_r: usize,
    pub blocks: usize,
    /// Standard deviation of the measurement noise.
    pub sigma: f64,
    /// Scale `A` by `1/√m` so its columns have unit expected norm.
    pub normalize: bool,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `u` as fractions of `2/‖A‖₂²`, each in (0, 1).
    pub u_fracs: Vec<f64>,
    /// `t` as fractions of `u`, each in (0, 1].
    pub t_fracs: Vec<f64>,
    pub iterations: usize,
    /// Objective gap that counts as converged.
    pub threshold: f64,
    pub seed: u64,
}

impl Default for UtSweepConfig {
    fn default() -> Self {
        Self {
            n: 128,
            m: 64,
            s_r: 20,
            blocks: 2,
            sigma: 0.1,
            normalize: true,
            lambda1: 0.01,
            lambda2: 0.01,
            u_fracs: (1..=9).map(|k| k as f64 / 10.0).collect(),
            t_fracs: (1..=10).map(|k| k as f64 / 10.0).collect(),
            iterations: 1000,
            threshold: 0.01,
            seed: 0,
        }
    }
}

/// Result of [`ut_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct UtSweep {
    /// One row per `(u, t)`: final gap and first iteration under the
    /// threshold (empty when never reached).
    pub summary: Table,
    /// Long format: the gap after every iteration for every `(u, t)`.
    pub curves: Table,
    /// Best objective value known: the reference solution's, or lower if a
    /// PGM-ISTA iterate beat it.
    pub f_star: f64,
}

/// Runs PGM-ISTA for a fixed budget on one noisy instance over a grid of
/// step pairs and measures `F(x^k) − F*` against the reference solver.
pub fn ut_sweep(cfg: &UtSweepConfig) -> Result<UtSweep> {
    if cfg.u_fracs.iter().any(|f| !(*f > 0.0 && *f < 1.0)) {
        return Err(Error::Config("u fractions must lie in (0, 1)".into()));
    }
    if cfg.t_fracs.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
        return Err(Error::Config("t fractions must lie in (0, 1]".into()));
    }
    if cfg.iterations == 0 || cfg.u_fracs.is_empty() || cfg.t_fracs.is_empty() {
        return Err(Error::Config(
            "need a nonempty grid and a positive iteration budget".into(),
        ));
    }
    let x = synth_signal(cfg.n, cfg.s_r, cfg.blocks, derive_seed(cfg.seed, 0))?.values;
    let mut a = gaussian_matrix(cfg.m, cfg.n, derive_seed(cfg.seed, 1))?;
    if cfg.normalize {
        a = a.scale(1.0 / (cfg.m as f64).sqrt());
    }
    let y = add_noise(&a.matvec(&x), cfg.sigma, derive_seed(cfg.seed, 2))?;
    let problem = SensingProblem::new(a, y)?;
    let reg = RegParams::new(cfg.lambda1, cfg.lambda2)?;
    let x0 = vec![0.0; cfg.n];
    let reference = reference_solve(&problem, &reg, &x0, &ReferenceConfig::default())?;
    let l = problem.spectral_norm_sq();

    let grid: Vec<(f64, f64)> = cfg
        .u_fracs
        .iter()
        .flat_map(|&uf| cfg.t_fracs.iter().map(move |&tf| (uf, tf)))
        .collect();
    let opts = SolveOptions::new(cfg.iterations, 0.0);
    let histories: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&(uf, tf)| {
            let u = uf * 2.0 / l;
            let r = pgm_ista(&problem, &reg, &StepParams { u, t: tf * u }, &x0, &opts)?;
            Ok(r.objective_history)
        })
        .collect::<Result<_>>()?;

    let f_star = histories
        .iter()
        .flatten()
        .fold(objective(&problem, &reg, &reference.x), |a, &b| a.min(b));

    let mut summary = Table::new(&["u_frac", "t_frac", "u", "t", "final_gap", "first_below"]);
    let mut curves = Table::new(&["u_frac", "t_frac", "iteration", "gap"]);
    for (&(uf, tf), hist) in grid.iter().zip(&histories) {
        let u = uf * 2.0 / l;
        let first = hist.iter().position(|f| f - f_star < cfg.threshold);
        summary.push(vec![
            uf.into(),
            tf.into(),
            u.into(),
            (tf * u).into(),
            (hist[hist.len() - 1] - f_star).into(),
            first.into(),
        ]);
        for (k, f) in hist.iter().enumerate() {
            curves.push(vec![uf.into(), tf.into(), k.into(), (f - f_star).into()]);
        }
    }
    Ok(UtSweep {
        summary,
        curves,
        f_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> UtSweepConfig {
        UtSweepConfig {
            n: 40,
            m: 20,
            s_r: 14,
            blocks: 1,
            u_fracs: vec![0.1, 0.9],
            t_fracs: vec![0.5, 1.0],
            iterations: 300,
            ..Default::default()
        }
    }

    #[test]
    fn gaps_are_nonnegative_and_large_steps_win() {
        let s = ut_sweep(&small()).unwrap();
        assert_eq!(s.summary.rows.len(), 4);
        assert_eq!(s.curves.rows.len(), 4 * 301);
        assert!(s.curves.floats("gap").iter().all(|g| g.unwrap() >= 0.0));
        let first = s.summary.floats("first_below");
        let (small_corner, big_corner) = (first[0], first[3]);
        assert!(big_corner.unwrap() < small_corner.unwrap_or(f64::INFINITY));
    }

    #[test]
    fn invalid_grid_is_rejected() {
        let cfg = UtSweepConfig {
            u_fracs: vec![1.0],
            ..small()
        };
        assert!(matches!(ut_sweep(&cfg), Err(Error::Config(_))));
        let cfg = UtSweepConfig {
            t_fracs: vec![0.0],
            ..small()
        };
        assert!(matches!(ut_sweep(&cfg), Err(Error::Config(_))));
    }
}
