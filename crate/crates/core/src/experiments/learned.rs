use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::gaussian_matrix;
use crate::rng::derive_seed;
use crate::signals::{add_noise, rel_err, synth_signal};
use crate::solvers::{pgm_step, RegParams, SensingProblem, StepParams};
use crate::unrolled::{
    forward, init_params, load_checkpoint, save_checkpoint, train, NetParams, Sample, TrainConfig, TrainHistory,
};

use super::Table;

/// File in a model directory that records the task.
pub const TASK_FILE: &str = "task.json";

/// A synthetic sensing task and the layer counts to train on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearnedTaskConfig {
    pub n: usize,
    pub m: usize,
    pub s_r: usize,
    pub blocks: usize,
    pub sigma: f64,
    pub train_samples: usize,
    pub test_samples: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub layers: Vec<usize>,
    /// Optimizer settings; `layers` inside is replaced per run.
    pub train: TrainConfig,
    pub seed: u64,
}

impl Default for LearnedTaskConfig {
    fn default() -> Self {
        Self {
            n: 64,
            m: 32,
            s_r: 10,
            blocks: 1,
            sigma: 0.0,
            train_samples: 500,
            test_samples: 100,
            lambda1: 0.01,
            lambda2: 1.0,
            layers: vec![2, 4, 6],
            train: TrainConfig::default(),
            seed: 0,
        }
    }
}

/// The shared sensing problem and the training and test samples.
pub struct Task {
    pub problem: SensingProblem,
    pub reg: RegParams,
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
}

impl LearnedTaskConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() || self.layers.contains(&0) {
            return Err(Error::Config("layer counts must be positive".into()));
        }
        if self.train_samples == 0 || self.test_samples == 0 {
            return Err(Error::Config("need training and test samples".into()));
        }
        self.train.validate()
    }

    /// Rebuilds the task from the seed. Stream 0 of the seed gives the
    /// matrix, streams 1 and 2 seed the training and test samples.
    pub fn build(&self) -> Result<Task> {
        self.validate()?;
        let a = gaussian_matrix(self.m, self.n, derive_seed(self.seed, 0))?;
        let make = |base: u64, count: usize| -> Result<Vec<Sample>> {
            (0..count)
                .map(|i| {
                    let s = derive_seed(base, i as u64);
                    let x = synth_signal(self.n, self.s_r, self.blocks, s)?.values;
                    let y = add_noise(&a.matvec(&x), self.sigma, derive_seed(s, 1))?;
                    Ok(Sample { y, x })
                })
                .collect()
        };
        let train = make(derive_seed(self.seed, 1), self.train_samples)?;
        let test = make(derive_seed(self.seed, 2), self.test_samples)?;
        let m = self.m;
        Ok(Task {
            problem: SensingProblem::new(a, vec![0.0; m])?,
            reg: RegParams::new(self.lambda1, self.lambda2)?,
            train,
            test,
        })
    }
}

/// One trained network.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainRun {
    pub layers: usize,
    pub params: NetParams,
    pub history: TrainHistory,
    pub seconds: f64,
}

pub fn train_models(cfg: &LearnedTaskConfig) -> Result<Vec<TrainRun>> {
    let task = cfg.build()?;
    cfg.layers
        .iter()
        .map(|&layers| {
            let tc = TrainConfig {
                layers,
                ..cfg.train.clone()
            };
            let start = Instant::now();
            let (params, history) = train(&task.problem, &task.reg, &task.train, &tc)?;
            Ok(TrainRun {
                layers,
                params,
                history,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

/// Per-epoch losses of every run.
pub fn history_table(runs: &[TrainRun]) -> Table {
    let mut t = Table::new(&["layers", "epoch", "train_loss", "val_loss", "best"]);
    for r in runs {
        for (e, (tl, vl)) in r.history.train_loss.iter().zip(&r.history.val_loss).enumerate() {
            t.push(vec![
                r.layers.into(),
                e.into(),
                (*tl).into(),
                (*vl).into(),
                (e == r.history.best_epoch).into(),
            ]);
        }
    }
    t
}

pub fn checkpoint_path(dir: &Path, layers: usize) -> PathBuf {
    dir.join(format!("lpgm-L{layers}.json"))
}

/// Writes `task.json` and one checkpoint per run into `dir`.
pub fn save_models(dir: &Path, cfg: &LearnedTaskConfig, runs: &[TrainRun]) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(TASK_FILE), serde_json::to_string_pretty(cfg)? + "\n")?;
    for r in runs {
        save_checkpoint(checkpoint_path(dir, r.layers), &r.params, cfg.seed)?;
    }
    Ok(())
}

/// Reads a directory written by [`save_models`].
pub fn load_models(dir: &Path) -> Result<(LearnedTaskConfig, Vec<NetParams>)> {
    let cfg: LearnedTaskConfig = serde_json::from_str(&fs::read_to_string(dir.join(TASK_FILE))?)?;
    let models = cfg
        .layers
        .iter()
        .map(|&l| load_checkpoint(checkpoint_path(dir, l)).map(|(p, _)| p))
        .collect::<Result<_>>()?;
    Ok((cfg, models))
}

/// Mean test RelErr and wall time of each network and of PGM-ISTA run for
/// the same number of iterations from zero with `u = 1/‖A‖₂²`, `t = 0.9u`.
pub fn eval_models(cfg: &LearnedTaskConfig, models: &[NetParams]) -> Result<Table> {
    let task = cfg.build()?;
    let mut table = Table::new(&["method", "layers", "mean_rel_err", "time_s"]);
    table.nondeterministic.push("time_s".into());
    for p in models {
        if p.n() != cfg.n || p.m() != cfg.m || p.lambda1 != cfg.lambda1 || p.lambda2 != cfg.lambda2 {
            return Err(Error::Config(format!(
                "checkpoint ({}x{}, λ = {}, {}) does not match the task",
                p.m(),
                p.n(),
                p.lambda1,
                p.lambda2
            )));
        }
        let start = Instant::now();
        let errs: Vec<f64> = task
            .test
            .par_iter()
            .map(|s| rel_err(&forward(p, &s.y, false)?.0, &s.x))
            .collect::<Result<_>>()?;
        let secs = start.elapsed().as_secs_f64();
        table.push(vec!["lpgm".into(), p.layers.into(), mean(&errs).into(), secs.into()]);

        let init = init_params(&task.problem, &task.reg, p.layers)?;
        let steps = StepParams { u: init.u, t: init.t };
        let start = Instant::now();
        let errs: Vec<f64> = task
            .test
            .par_iter()
            .map(|s| {
                let problem = task.problem.with_measurements(s.y.clone())?;
                let mut x = vec![0.0; cfg.n];
                for _ in 0..p.layers {
                    x = pgm_step(&problem, &task.reg, &steps, &x);
                }
                rel_err(&x, &s.x)
            })
            .collect::<Result<_>>()?;
        let secs = start.elapsed().as_secs_f64();
        table.push(vec!["pgm".into(), p.layers.into(), mean(&errs).into(), secs.into()]);
    }
    Ok(table)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
