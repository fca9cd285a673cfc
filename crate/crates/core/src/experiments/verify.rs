use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{mc_width_upper, phi, BoundQuery};
use crate::error::{Error, Result};
use crate::linalg::{gaussian_matrix, DenseMatrix};
use crate::prox::{tv_prox, tv_prox_kkt_residual};
use crate::rng::{self, derive_seed};
use crate::signals::{sparsity_levels, synth_signal, DEFAULT_SPARSITY_TOL};
use crate::solvers::{pgm_step, RegParams, SensingProblem, StepParams};
use crate::unrolled::{forward, grad_check_with, init_params, Fault, NetParams};

use super::{Table, Value};

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst value seen.
    pub measured: f64,
    /// Bound `measured` is compared against.
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["check", "passed", "measured", "threshold", "detail"]);
        for c in &self.checks {
            t.push(vec![
                c.name.as_str().into(),
                c.passed.into(),
                c.measured.into(),
                c.threshold.into(),
                Value::Text(c.detail.clone()),
            ]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    pub kkt_trials: usize,
    pub kkt_max_n: usize,
    pub kkt_tol: f64,
    /// Screened instances for the gradient check, cycling through
    /// `grad_layers`.
    pub grad_instances: usize,
    pub grad_layers: Vec<usize>,
    pub grad_n: usize,
    pub grad_m: usize,
    pub fd_step: f64,
    pub grad_tol: f64,
    /// Largest depth for the forward/PGM-ISTA consistency check.
    pub consistency_layers: usize,
    pub consistency_tol: f64,
    /// Test hook: flip the sign of the threshold sensitivity in the reverse
    /// sweep, which the gradient check must catch.
    pub inject_fault: bool,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            kkt_trials: 1000,
            kkt_max_n: 512,
            kkt_tol: 1e-8,
            grad_instances: 20,
            grad_layers: vec![1, 2, 4],
            grad_n: 12,
            grad_m: 8,
            fd_step: 1e-6,
            grad_tol: 1e-5,
            consistency_layers: 20,
            consistency_tol: 1e-12,
            inject_fault: false,
            seed: 0,
        }
    }
}

/// Runs the TV-prox KKT check on random inputs, the gradient check on
/// screened networks, a self-test that the gradient check notices a wrong
/// sign, and the forward/PGM-ISTA consistency check.
pub fn verify(cfg: &VerifyConfig) -> Result<Report> {
    if cfg.kkt_trials == 0 || cfg.grad_instances == 0 || cfg.kkt_max_n < 2 {
        return Err(Error::Config("trial counts must be positive and kkt_max_n >= 2".into()));
    }
    if cfg.grad_layers.is_empty() || cfg.grad_layers.contains(&0) || cfg.consistency_layers == 0 {
        return Err(Error::Config("layer counts must be positive".into()));
    }
    let fault = if cfg.inject_fault {
        Fault::FlipProxThresholdSign
    } else {
        Fault::None
    };
    Ok(Report {
        checks: vec![
            kkt_check(cfg)?,
            gradient_check(cfg, fault)?,
            fault_detection(cfg)?,
            consistency_check(cfg)?,
        ],
    })
}

fn kkt_check(cfg: &VerifyConfig) -> Result<CheckResult> {
    let base = derive_seed(cfg.seed, 0);
    let residuals: Vec<f64> = (0..cfg.kkt_trials)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::substream(base, i as u64);
            let n = rand::Rng::random_range(&mut r, 2..=cfg.kkt_max_n);
            let scale = 10f64.powf(rand::Rng::random_range(&mut r, -2.0..2.0));
            let x: Vec<f64> = rng::normal_vec(&mut r, n).iter().map(|v| v * scale).collect();
            let mu = scale * 10f64.powf(rand::Rng::random_range(&mut r, -3.0..1.0));
            let z = tv_prox(&x, mu)?.z;
            Ok(tv_prox_kkt_residual(&x, mu, &z))
        })
        .collect::<Result<_>>()?;
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    let failures = residuals.iter().filter(|&&r| !(r <= cfg.kkt_tol)).count();
    Ok(CheckResult {
        name: "tv_prox_kkt".into(),
        passed: failures == 0,
        measured: worst,
        threshold: cfg.kkt_tol,
        detail: format!("{} inputs, n <= {}, {failures} failures", cfg.kkt_trials, cfg.kkt_max_n),
    })
}

/// Network with parameters moved off the PGM-ISTA initialization.
fn random_net(cfg: &VerifyConfig, layers: usize, seed: u64) -> Result<(NetParams, Vec<f64>, Vec<f64>)> {
    let a = gaussian_matrix(cfg.grad_m, cfg.grad_n, seed)?;
    let mut r = rng::substream(seed, 1);
    let x = rng::normal_vec(&mut r, cfg.grad_n);
    let y = a.matvec(&x);
    let problem = SensingProblem::new(a, y.clone())?;
    let mut net = init_params(&problem, &RegParams::new(0.3, 0.5)?, layers)?;
    let jitter = |m: &mut DenseMatrix, r: &mut rng::Rng, s: f64| {
        for v in m.as_mut_slice() {
            *v += s * rng::standard_normal(r);
        }
    };
    jitter(&mut net.w_x, &mut r, 0.01);
    jitter(&mut net.w_y, &mut r, 0.01 * net.u);
    Ok((net, y, x))
}

/// Errors of the first `count` instances on which the gradient check finds
/// a stable probe point, and how many instances were passed over.
fn screened(cfg: &VerifyConfig, fault: Fault, count: usize) -> Result<(Vec<f64>, usize)> {
    let base = derive_seed(cfg.seed, 1);
    let mut errs = Vec::new();
    let mut rejected = 0;
    let mut k = 0u64;
    while errs.len() < count {
        if rejected > 20 * count {
            return Err(Error::ScreenedPointNotFound(format!(
                "only {} of {count} instances screened after {rejected} rejections",
                errs.len()
            )));
        }
        let layers = cfg.grad_layers[errs.len() % cfg.grad_layers.len()];
        let (net, y, x) = random_net(cfg, layers, derive_seed(base, k))?;
        k += 1;
        match grad_check_with(&net, &y, &x, cfg.fd_step, fault) {
            Ok(rep) => errs.push(rep.max_rel_err),
            Err(Error::ScreenedPointNotFound(_)) => rejected += 1,
            Err(e) => return Err(e),
        }
    }
    Ok((errs, rejected))
}

fn gradient_check(cfg: &VerifyConfig, fault: Fault) -> Result<CheckResult> {
    let (errs, rejected) = screened(cfg, fault, cfg.grad_instances)?;
    let worst = errs.iter().copied().fold(0.0, f64::max);
    Ok(CheckResult {
        name: "grad_check".into(),
        passed: worst < cfg.grad_tol,
        measured: worst,
        threshold: cfg.grad_tol,
        detail: format!(
            "{} screened instances (n = {}, L in {:?}), {rejected} rejected{}",
            errs.len(),
            cfg.grad_n,
            cfg.grad_layers,
            if cfg.inject_fault { ", fault injected" } else { "" }
        ),
    })
}

/// With the sign fault forced on, at least one instance must exceed the
/// tolerance; otherwise the gradient check could not tell.
fn fault_detection(cfg: &VerifyConfig) -> Result<CheckResult> {
    let (errs, _) = screened(cfg, Fault::FlipProxThresholdSign, cfg.grad_instances)?;
    let worst = errs.iter().copied().fold(0.0, f64::max);
    Ok(CheckResult {
        name: "grad_check_detects_fault".into(),
        passed: worst >= cfg.grad_tol,
        measured: worst,
        threshold: cfg.grad_tol,
        detail: "largest error with a flipped threshold sensitivity; must exceed the threshold".into(),
    })
}

fn consistency_check(cfg: &VerifyConfig) -> Result<CheckResult> {
    let base = derive_seed(cfg.seed, 2);
    let mut worst: f64 = 0.0;
    for k in 0..3u64 {
        let (n, m) = (cfg.grad_n, cfg.grad_m);
        let a = gaussian_matrix(m, n, derive_seed(base, k))?;
        let y = rng::normal_vec(&mut rng::substream(base, k + 100), m);
        let problem = SensingProblem::new(a, y.clone())?;
        let reg = RegParams::new(0.05, 0.1)?;
        let net = init_params(&problem, &reg, cfg.consistency_layers)?;
        let steps = StepParams { u: net.u, t: net.t };
        let mut x = vec![0.0; n];
        for layers in 1..=cfg.consistency_layers {
            x = pgm_step(&problem, &reg, &steps, &x);
            let (xn, _) = forward(&net.with_layers(layers), &y, false)?;
            for (p, q) in x.iter().zip(&xn) {
                worst = worst.max((p - q).abs());
            }
        }
    }
    Ok(CheckResult {
        name: "forward_matches_pgm".into(),
        passed: worst <= cfg.consistency_tol,
        measured: worst,
        threshold: cfg.consistency_tol,
        detail: format!("entrywise, L <= {}", cfg.consistency_layers),
    })
}

/// One Monte-Carlo width configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthCase {
    pub s_r: usize,
    pub blocks: usize,
    pub lambda1: f64,
    pub lambda2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WidthMcConfig {
    pub n: usize,
    pub cases: Vec<WidthCase>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for WidthMcConfig {
    fn default() -> Self {
        let case = |s_r, blocks| WidthCase {
            s_r,
            blocks,
            lambda1: 1.0,
            lambda2: 1.0,
        };
        Self {
            n: 100,
            cases: vec![case(20, 1), case(10, 1), case(30, 2), case(40, 3), case(15, 0)],
            trials: 2000,
            seed: 0,
        }
    }
}

/// Compares the Monte-Carlo estimate with `Φ` on a synthetic signal per
/// case. A case passes when `mean ≤ Φ + 3·stderr`.
pub fn width_mc(cfg: &WidthMcConfig) -> Result<(Report, Table)> {
    if cfg.trials < 2 {
        return Err(Error::Config(format!("need at least 2 trials, got {}", cfg.trials)));
    }
    if cfg.cases.is_empty() {
        return Err(Error::Config("no cases".into()));
    }
    let mut table = Table::new(&[
        "case",
        "n",
        "s_r",
        "s_g",
        "lambda1",
        "lambda2",
        "mc_mean",
        "mc_stderr",
        "phi",
        "passed",
    ]);
    let mut checks = Vec::new();
    for (i, c) in cfg.cases.iter().enumerate() {
        let x = synth_signal(cfg.n, c.s_r, c.blocks, derive_seed(cfg.seed, 2 * i as u64))?.values;
        let (s_r, s_g) = sparsity_levels(&x, DEFAULT_SPARSITY_TOL)?;
        let p = phi(&BoundQuery::new(cfg.n, s_r, s_g, c.lambda1, c.lambda2, 1.0)?)?;
        let est = mc_width_upper(
            &x,
            c.lambda1,
            c.lambda2,
            cfg.trials,
            derive_seed(cfg.seed, 2 * i as u64 + 1),
        )?;
        let bound = p + 3.0 * est.stderr;
        let passed = est.mean <= bound;
        table.push(vec![
            i.into(),
            cfg.n.into(),
            s_r.into(),
            s_g.into(),
            c.lambda1.into(),
            c.lambda2.into(),
            est.mean.into(),
            est.stderr.into(),
            p.into(),
            passed.into(),
        ]);
        checks.push(CheckResult {
            name: format!("width_mc_case_{i}"),
            passed,
            measured: est.mean,
            threshold: bound,
            detail: format!(
                "s_r = {s_r}, s_g = {s_g}, λ = ({}, {}), Φ = {p:.3}, stderr = {:.3}",
                c.lambda1, c.lambda2, est.stderr
            ),
        });
    }
    Ok((Report { checks }, table))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyConfig {
        VerifyConfig {
            kkt_trials: 50,
            kkt_max_n: 64,
            grad_instances: 3,
            consistency_layers: 5,
            ..Default::default()
        }
    }

    #[test]
    fn healthy_build_passes() {
        let r = verify(&quick()).unwrap();
        assert!(r.passed(), "{r:#?}");
        assert_eq!(r.to_table().rows.len(), 4);
    }

    #[test]
    fn injected_fault_fails_the_gradient_check() {
        let r = verify(&VerifyConfig {
            inject_fault: true,
            ..quick()
        })
        .unwrap();
        assert!(!r.passed());
        let g = r.checks.iter().find(|c| c.name == "grad_check").unwrap();
        assert!(!g.passed);
    }

    #[test]
    fn zero_trials_is_a_config_error() {
        let cfg = WidthMcConfig {
            trials: 0,
            ..Default::default()
        };
        assert!(matches!(width_mc(&cfg), Err(Error::Config(_))));
        let cfg = VerifyConfig {
            kkt_trials: 0,
            ..Default::default()
        };
        assert!(matches!(verify(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn width_report_has_one_row_per_case() {
        let cfg = WidthMcConfig {
            cases: vec![WidthCase {
                s_r: 10,
                blocks: 1,
                lambda1: 0.1,
                lambda2: 1.0,
            }],
            trials: 200,
            ..Default::default()
        };
        let (rep, table) = width_mc(&cfg).unwrap();
        assert_eq!(rep.checks.len(), 1);
        assert_eq!(table.rows.len(), 1);
        let c = &rep.checks[0];
        assert_eq!(c.passed, c.measured <= c.threshold);
        assert_eq!(table.floats("mc_mean")[0], Some(c.measured));
    }
}
