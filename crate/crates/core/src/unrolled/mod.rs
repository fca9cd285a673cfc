//! LPGM-ISTA: PGM-ISTA unrolled into `L` layers that share one set of
//! learnable parameters `{W_x, W_y, u, t}`.
//!
//! A layer maps `x` to
//!
//! ```text
//! v = W_x x + W_y y
//! a = S_{λ₁u}(v)
//! w = (1 − t/u)x + (t/u)a
//! x⁺ = T_{λ₂t}(w)
//! ```
//!
//! and with `W_x = I − uAᵀA`, `W_y = uAᵀ` this is exactly one PGM-ISTA step.
//! The backward pass is hand-written: the soft threshold contributes a
//! boolean mask, the TV prox its segment structure (see
//! [`tv_prox_jacobian_vjp`]).

mod checkpoint;
mod gradcheck;
mod train;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use gradcheck::{grad_check, grad_check_with, GradCheckReport};
pub use train::{train, Sample, TrainConfig, TrainHistory, MIN_STEP};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::prox::{shrink, tv_prox, tv_prox_jacobian_vjp, TautStringResult};
use crate::solvers::{RegParams, SensingProblem};

/// Tied parameters of an `layers`-deep network. `λ₁`, `λ₂` are fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetParams {
    pub w_x: DenseMatrix,
    pub w_y: DenseMatrix,
    pub u: f64,
    pub t: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub layers: usize,
}

impl NetParams {
    pub fn n(&self) -> usize {
        self.w_x.rows()
    }

    pub fn m(&self) -> usize {
        self.w_y.cols()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.w_x.rows();
        if self.w_x.cols() != n || self.w_y.rows() != n {
            return Err(Error::size(format!(
                "W_x is {:?} and W_y is {:?}",
                self.w_x.shape(),
                self.w_y.shape()
            )));
        }
        if self.layers == 0 {
            return Err(Error::domain("network needs at least one layer"));
        }
        if !(self.u > 0.0 && self.t > 0.0 && self.u.is_finite() && self.t.is_finite()) {
            return Err(Error::domain(format!(
                "u = {}, t = {} must be positive",
                self.u, self.t
            )));
        }
        if !(self.lambda1 >= 0.0 && self.lambda2 >= 0.0) {
            return Err(Error::domain("penalties must be nonnegative"));
        }
        Ok(())
    }

    /// Same parameters at a different depth.
    pub fn with_layers(&self, layers: usize) -> Self {
        Self { layers, ..self.clone() }
    }
}

/// PGM-ISTA initialization: `u = 1/‖A‖₂²`, `t = 0.9u`, `W_x = I − uAᵀA`,
/// `W_y = uAᵀ`.
pub fn init_params(problem: &SensingProblem, reg: &RegParams, layers: usize) -> Result<NetParams> {
    if layers == 0 {
        return Err(Error::domain("network needs at least one layer"));
    }
    let l = problem.spectral_norm_sq();
    if !(l > 0.0) {
        return Err(Error::domain("sensing matrix has zero spectral norm"));
    }
    let u = 1.0 / l;
    let n = problem.n();
    let w_x = DenseMatrix::identity(n).sub(&problem.a().gram().scale(u));
    let w_y = problem.a().transpose().scale(u);
    Ok(NetParams {
        w_x,
        w_y,
        u,
        t: 0.9 * u,
        lambda1: reg.lambda1,
        lambda2: reg.lambda2,
        layers,
    })
}

/// What one layer keeps for the reverse sweep: no dense Jacobians, only the
/// pre-activation, the threshold mask, the prox segmentation and `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerTape {
    pub v: Vec<f64>,
    pub mask: Vec<bool>,
    pub prox: TautStringResult,
    pub w: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Tape {
    pub y: Vec<f64>,
    pub layers: Vec<LayerTape>,
}

/// Forward pass from `x⁰ = 0`. With `record = false` the returned tape is
/// empty and cannot be used by [`backward`].
pub fn forward(params: &NetParams, y: &[f64], record: bool) -> Result<(Vec<f64>, Tape)> {
    params.validate()?;
    if y.len() != params.m() {
        return Err(Error::size(format!(
            "y has length {}, W_y has {} columns",
            y.len(),
            params.m()
        )));
    }
    let (u, t) = (params.u, params.t);
    let ratio = t / u;
    let thr = params.lambda1 * u;
    let wyy = params.w_y.matvec(y);
    let mut x = vec![0.0; params.n()];
    let mut tape = Tape {
        y: if record { y.to_vec() } else { Vec::new() },
        layers: Vec::new(),
    };
    for _ in 0..params.layers {
        let mut v = params.w_x.matvec(&x);
        for (vi, bi) in v.iter_mut().zip(&wyy) {
            *vi += bi;
        }
        let w: Vec<f64> = x
            .iter()
            .zip(&v)
            .map(|(&xi, &vi)| (1.0 - ratio) * xi + ratio * shrink(vi, thr))
            .collect();
        let prox = tv_prox(&w, params.lambda2 * t)?;
        x = prox.z.clone();
        if record {
            let mask = v.iter().map(|vi| vi.abs() > thr).collect();
            tape.layers.push(LayerTape { v, mask, prox, w });
        }
    }
    Ok((x, tape))
}

/// Gradients with the shapes of [`NetParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrads {
    pub w_x: DenseMatrix,
    pub w_y: DenseMatrix,
    pub u: f64,
    pub t: f64,
}

impl ParamGrads {
    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            w_x: DenseMatrix::zeros(n, n),
            w_y: DenseMatrix::zeros(n, m),
            u: 0.0,
            t: 0.0,
        }
    }

    fn add_scaled(&mut self, other: &Self, s: f64) {
        for (a, b) in self.w_x.as_mut_slice().iter_mut().zip(other.w_x.as_slice()) {
            *a += s * b;
        }
        for (a, b) in self.w_y.as_mut_slice().iter_mut().zip(other.w_y.as_slice()) {
            *a += s * b;
        }
        self.u += s * other.u;
        self.t += s * other.t;
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite()
            && self.t.is_finite()
            && self.w_x.as_slice().iter().all(|v| v.is_finite())
            && self.w_y.as_slice().iter().all(|v| v.is_finite())
    }
}

/// Deliberate corruptions of the reverse sweep, used to check that the
/// gradient checker notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Flip the sign of the TV prox's threshold derivative.
    FlipProxThresholdSign,
}

/// Reverse sweep for `∂ℓ/∂x̂ = grad_out`; tied parameters accumulate over
/// layers.
pub fn backward(params: &NetParams, tape: &Tape, grad_out: &[f64]) -> Result<ParamGrads> {
    backward_with(params, tape, grad_out, Fault::None)
}

pub fn backward_with(params: &NetParams, tape: &Tape, grad_out: &[f64], fault: Fault) -> Result<ParamGrads> {
    if tape.layers.len() != params.layers || tape.y.len() != params.m() {
        return Err(Error::Usage(format!(
            "tape holds {} layers for a {}-layer network; run forward with record = true",
            tape.layers.len(),
            params.layers
        )));
    }
    let n = params.n();
    if grad_out.len() != n {
        return Err(Error::size(format!(
            "grad_out has length {}, expected {n}",
            grad_out.len()
        )));
    }
    let (u, t) = (params.u, params.t);
    let ratio = t / u;
    let thr = params.lambda1 * u;
    let mut grads = ParamGrads::zeros(n, params.m());
    let mut gx = grad_out.to_vec();
    let zeros = vec![0.0; n];

    for k in (0..params.layers).rev() {
        let layer = &tape.layers[k];
        let x_in: &[f64] = if k == 0 { &zeros } else { &tape.layers[k - 1].prox.z };

        let (gw, mut gmu) = tv_prox_jacobian_vjp(&layer.prox, &gx)?;
        if fault == Fault::FlipProxThresholdSign {
            gmu = -gmu;
        }
        grads.t += params.lambda2 * gmu;

        let mut gv = vec![0.0; n];
        let mut next_gx = vec![0.0; n];
        for i in 0..n {
            let a = shrink(layer.v[i], thr);
            // w = (1 − t/u)x + (t/u)a
            grads.t += gw[i] * (a - x_in[i]) / u;
            grads.u += gw[i] * ratio / u * (x_in[i] - a);
            next_gx[i] = (1.0 - ratio) * gw[i];
            if layer.mask[i] {
                let ga = ratio * gw[i];
                gv[i] = ga;
                // threshold λ₁u moves a by −sign(v)λ₁ per unit of u
                grads.u -= ga * layer.v[i].signum() * params.lambda1;
            }
        }
        grads.w_x.add_outer(1.0, &gv, x_in);
        grads.w_y.add_outer(1.0, &gv, &tape.y);
        let back = params.w_x.matvec_t(&gv);
        for (g, b) in next_gx.iter_mut().zip(&back) {
            *g += b;
        }
        gx = next_gx;
    }
    Ok(grads)
}

/// `(1/N) Σ ‖x̂_i − x_i‖²` over `(y_i, x_i)` pairs.
pub fn loss(params: &NetParams, batch: &[Sample]) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::domain("empty batch"));
    }
    let mut total = 0.0;
    for s in batch {
        check_label(params, s)?;
        let (xh, _) = forward(params, &s.y, false)?;
        let d = linalg::dist2(&xh, &s.x);
        total += d * d;
    }
    Ok(total / batch.len() as f64)
}

fn check_label(params: &NetParams, s: &Sample) -> Result<()> {
    if s.x.len() != params.n() {
        return Err(Error::size(format!(
            "label has length {}, network has n = {}",
            s.x.len(),
            params.n()
        )));
    }
    Ok(())
}

/// Batch loss and its gradient. Samples run in parallel; their gradients
/// are summed in batch order.
pub fn loss_and_grad(params: &NetParams, batch: &[Sample]) -> Result<(f64, ParamGrads)> {
    if batch.is_empty() {
        return Err(Error::domain("empty batch"));
    }
    let scale = 1.0 / batch.len() as f64;
    let per_sample: Vec<Result<(f64, ParamGrads)>> = batch
        .par_iter()
        .map(|s| {
            check_label(params, s)?;
            let (xh, tape) = forward(params, &s.y, true)?;
            let diff = linalg::sub(&xh, &s.x);
            let g: Vec<f64> = diff.iter().map(|d| 2.0 * scale * d).collect();
            let grads = backward(params, &tape, &g)?;
            Ok((linalg::dot(&diff, &diff), grads))
        })
        .collect();
    let mut total = 0.0;
    let mut grads = ParamGrads::zeros(params.n(), params.m());
    for r in per_sample {
        let (l, g) = r?;
        total += l;
        grads.add_scaled(&g, 1.0);
    }
    Ok((total * scale, grads))
}
