use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

use super::{backward_with, forward, Fault, NetParams};

/// How often the probe step is halved before giving up on a point.
const MAX_HALVINGS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradCheckReport {
    /// Largest of the four per-group errors.
    pub max_rel_err: f64,
    pub w_x: f64,
    pub w_y: f64,
    pub u: f64,
    pub t: f64,
    /// Finite-difference step actually used.
    pub fd_step: f64,
}

/// Compares [`backward`](super::backward) with central differences of
/// `‖net(y) − x_label‖²` and returns the largest per-group error
/// `‖analytic − fd‖ / (‖fd‖ + 1e-12)` over `W_x`, `W_y`, `u`, `t`.
pub fn grad_check(params: &NetParams, y: &[f64], x_label: &[f64], fd_step: f64) -> Result<f64> {
    Ok(grad_check_with(params, y, x_label, fd_step, Fault::None)?.max_rel_err)
}

/// [`grad_check`] with an optional fault injected into the reverse sweep.
///
/// Matrix entries are perturbed by `±fd_step`, the scalars `u` and `t` by
/// `±fd_step` relative to their value. Every perturbed evaluation must
/// reproduce the soft-threshold masks and prox segmentations of the base
/// point; if one does not, the step is halved and the check restarts, up to
/// four times.
pub fn grad_check_with(
    params: &NetParams,
    y: &[f64],
    x_label: &[f64],
    fd_step: f64,
    fault: Fault,
) -> Result<GradCheckReport> {
    if !(fd_step > 0.0) {
        return Err(Error::domain(format!("fd_step must be positive, got {fd_step}")));
    }
    if x_label.len() != params.n() {
        return Err(Error::size(format!(
            "label has length {}, n = {}",
            x_label.len(),
            params.n()
        )));
    }
    let (xh, tape) = forward(params, y, true)?;
    let base = pattern(&tape);
    let g: Vec<f64> = xh.iter().zip(x_label).map(|(a, b)| 2.0 * (a - b)).collect();
    let analytic = backward_with(params, &tape, &g, fault)?;

    let n_wx = params.w_x.as_slice().len();
    let n_wy = params.w_y.as_slice().len();
    let total = n_wx + n_wy + 2;

    let mut h = fd_step;
    for _ in 0..=MAX_HALVINGS {
        let fd: Option<Vec<f64>> = (0..total)
            .into_par_iter()
            .map(|k| {
                let plus = probe(params, y, x_label, k, n_wx, n_wy, h, &base)?;
                let minus = probe(params, y, x_label, k, n_wx, n_wy, -h, &base)?;
                let scale = if k == n_wx + n_wy {
                    params.u
                } else if k == n_wx + n_wy + 1 {
                    params.t
                } else {
                    1.0
                };
                Some((plus - minus) / (2.0 * h * scale))
            })
            .collect();
        let Some(fd) = fd else {
            h *= 0.5;
            continue;
        };
        let w_x = group_err(analytic.w_x.as_slice(), &fd[..n_wx]);
        let w_y = group_err(analytic.w_y.as_slice(), &fd[n_wx..n_wx + n_wy]);
        let u = group_err(&[analytic.u], &fd[n_wx + n_wy..n_wx + n_wy + 1]);
        let t = group_err(&[analytic.t], &fd[n_wx + n_wy + 1..]);
        return Ok(GradCheckReport {
            max_rel_err: w_x.max(w_y).max(u).max(t),
            w_x,
            w_y,
            u,
            t,
            fd_step: h,
        });
    }
    Err(Error::ScreenedPointNotFound(format!(
        "activation pattern changes within ±{h:e} of the probe point"
    )))
}

fn group_err(analytic: &[f64], fd: &[f64]) -> f64 {
    linalg::dist2(analytic, fd) / (linalg::norm2(fd) + 1e-12)
}

/// Mask and segment bits of every layer, in order.
fn pattern(tape: &super::Tape) -> Vec<bool> {
    tape.layers
        .iter()
        .flat_map(|l| l.mask.iter().chain(&l.prox.segment_support).copied())
        .collect()
}

/// Loss with parameter `k` shifted by `delta` (relatively for `u`, `t`), or
/// `None` when the shift changes the activation pattern.
#[allow(clippy::too_many_arguments)]
fn probe(
    params: &NetParams,
    y: &[f64],
    x_label: &[f64],
    k: usize,
    n_wx: usize,
    n_wy: usize,
    delta: f64,
    base: &[bool],
) -> Option<f64> {
    let mut p = params.clone();
    if k < n_wx {
        p.w_x.as_mut_slice()[k] += delta;
    } else if k < n_wx + n_wy {
        p.w_y.as_mut_slice()[k - n_wx] += delta;
    } else if k == n_wx + n_wy {
        p.u += delta * params.u;
    } else {
        p.t += delta * params.t;
    }
    let (xh, tape) = forward(&p, y, true).ok()?;
    if pattern(&tape) != base {
        return None;
    }
    let d = linalg::dist2(&xh, x_label);
    Some(d * d)
}
