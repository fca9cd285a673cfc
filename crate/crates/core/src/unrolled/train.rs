use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::solvers::{RegParams, SensingProblem};

use super::{init_params, loss, loss_and_grad, NetParams, ParamGrads};

/// Lower bound kept on `u` and `t` after every update.
pub const MIN_STEP: f64 = 1e-8;

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

/// A measurement vector and the signal it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub y: Vec<f64>,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub layers: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Share of the data held out for model selection.
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            layers: 2,
            learning_rate: 1e-3,
            batch_size: 32,
            epochs: 200,
            validation_fraction: 0.1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 || self.batch_size == 0 {
            return Err(Error::Config("layers and batch_size must be positive".into()));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("invalid learning rate {}", self.learning_rate)));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(Error::Config(format!(
                "validation_fraction must lie in [0, 1), got {}",
                self.validation_fraction
            )));
        }
        Ok(())
    }
}

/// Losses on the fixed training and validation splits: entry 0 is the
/// initialization, entry `e` the end of epoch `e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    /// Epoch whose parameters were returned (0 = initialization).
    pub best_epoch: usize,
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
}

impl Adam {
    fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            step: 0,
        }
    }

    /// `lr[i]` is the learning rate of coordinate `i`'s group.
    fn update(&mut self, params: &mut [f64], grads: &[f64], lr: impl Fn(usize) -> f64) {
        self.step += 1;
        let c1 = 1.0 - BETA1.powi(self.step);
        let c2 = 1.0 - BETA2.powi(self.step);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = BETA1 * self.m[i] + (1.0 - BETA1) * g;
            self.v[i] = BETA2 * self.v[i] + (1.0 - BETA2) * g * g;
            let mh = self.m[i] / c1;
            let vh = self.v[i] / c2;
            params[i] -= lr(i) * mh / (vh.sqrt() + ADAM_EPS);
        }
    }
}

fn flatten(p: &NetParams) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.w_x.as_slice().len() + p.w_y.as_slice().len() + 2);
    out.extend_from_slice(p.w_x.as_slice());
    out.extend_from_slice(p.w_y.as_slice());
    out.push(p.u);
    out.push(p.t);
    out
}

fn flatten_grads(g: &ParamGrads) -> Vec<f64> {
    let mut out = Vec::with_capacity(g.w_x.as_slice().len() + g.w_y.as_slice().len() + 2);
    out.extend_from_slice(g.w_x.as_slice());
    out.extend_from_slice(g.w_y.as_slice());
    out.push(g.u);
    out.push(g.t);
    out
}

fn unflatten(p: &mut NetParams, flat: &[f64]) {
    let a = p.w_x.as_slice().len();
    let b = p.w_y.as_slice().len();
    p.w_x.as_mut_slice().copy_from_slice(&flat[..a]);
    p.w_y.as_mut_slice().copy_from_slice(&flat[a..a + b]);
    p.u = flat[a + b].max(MIN_STEP);
    p.t = flat[a + b + 1].max(MIN_STEP);
}

/// Non-finite values reach the TV prox as a domain error; during training
/// that means the iteration blew up.
fn diverged(e: Error, epoch: usize, batch: usize) -> Error {
    match e {
        Error::Domain(msg) => Error::Divergence(format!("epoch {epoch}, batch {batch}: {msg}")),
        other => other,
    }
}

/// Trains LPGM-ISTA from the PGM-ISTA initialization with Adam.
///
/// The data are split once (seeded) into training and validation parts;
/// each epoch visits the training part in a fresh seeded order. Matrix
/// entries use `learning_rate` directly, while `u` and `t` use
/// `learning_rate` times their initial value, since their natural scale is
/// `1/‖A‖₂²`. Returns the parameters with the lowest validation loss.
pub fn train(
    problem: &SensingProblem,
    reg: &RegParams,
    data: &[Sample],
    cfg: &TrainConfig,
) -> Result<(NetParams, TrainHistory)> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::Config("empty training set".into()));
    }
    for (i, s) in data.iter().enumerate() {
        if s.y.len() != problem.m() || s.x.len() != problem.n() {
            return Err(Error::size(format!("sample {i} does not match the sensing problem")));
        }
    }
    let mut params = init_params(problem, reg, cfg.layers)?;

    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut rng::seeded(cfg.seed));
    let n_val = ((data.len() as f64) * cfg.validation_fraction).round() as usize;
    let n_val = n_val.min(data.len() - 1);
    let val: Vec<Sample> = order[..n_val].iter().map(|&i| data[i].clone()).collect();
    let train_set: Vec<Sample> = order[n_val..].iter().map(|&i| data[i].clone()).collect();
    let select = |p: &NetParams, train_loss: f64| -> Result<f64> {
        if val.is_empty() {
            Ok(train_loss)
        } else {
            loss(p, &val)
        }
    };

    let n_mat = params.w_x.as_slice().len() + params.w_y.as_slice().len();
    let (lr, lr_u, lr_t) = (
        cfg.learning_rate,
        cfg.learning_rate * params.u,
        cfg.learning_rate * params.t,
    );
    let group_lr = |i: usize| {
        if i < n_mat {
            lr
        } else if i == n_mat {
            lr_u
        } else {
            lr_t
        }
    };

    let l0 = loss(&params, &train_set)?;
    let v0 = select(&params, l0)?;
    let mut history = TrainHistory {
        train_loss: vec![l0],
        val_loss: vec![v0],
        best_epoch: 0,
    };
    let mut best = (v0, params.clone());
    let mut adam = Adam::new(n_mat + 2);
    let mut flat = flatten(&params);

    for epoch in 1..=cfg.epochs {
        let mut idx: Vec<usize> = (0..train_set.len()).collect();
        idx.shuffle(&mut rng::substream(cfg.seed, epoch as u64));
        for (b, chunk) in idx.chunks(cfg.batch_size).enumerate() {
            let batch: Vec<Sample> = chunk.iter().map(|&i| train_set[i].clone()).collect();
            let (l, g) = loss_and_grad(&params, &batch).map_err(|e| diverged(e, epoch, b))?;
            if !l.is_finite() || !g.is_finite() {
                return Err(Error::Divergence(format!(
                    "non-finite loss or gradient at epoch {epoch}, batch {b} (u = {}, t = {})",
                    params.u, params.t
                )));
            }
            adam.update(&mut flat, &flatten_grads(&g), group_lr);
            unflatten(&mut params, &flat);
            // keep the optimizer state consistent with the projection
            let k = flat.len();
            flat[k - 2] = params.u;
            flat[k - 1] = params.t;
        }
        let tl = loss(&params, &train_set).map_err(|e| diverged(e, epoch, 0))?;
        let vl = select(&params, tl).map_err(|e| diverged(e, epoch, 0))?;
        if !tl.is_finite() || !vl.is_finite() {
            return Err(Error::Divergence(format!("non-finite loss after epoch {epoch}")));
        }
        history.train_loss.push(tl);
        history.val_loss.push(vl);
        if vl < best.0 {
            best = (vl, params.clone());
            history.best_epoch = epoch;
        }
    }
    Ok((best.1, history))
}
