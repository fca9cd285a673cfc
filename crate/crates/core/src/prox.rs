//! Proximal operators of the ℓ¹ norm and the 1-D total variation, their
//! composition, the gradient mapping, and the weak Jacobian of the TV prox.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::linalg::norm_inf;
use crate::solvers::SensingProblem;

/// Relative threshold below which a difference of the TV prox output is
/// treated as "no jump".
pub const JUMP_REL_TOL: f64 = 1e-10;

/// `sign(x_i) · max(0, |x_i| − tau)` elementwise.
pub fn soft_threshold(x: &[f64], tau: f64) -> Result<Vec<f64>> {
    if !(tau >= 0.0) {
        return Err(Error::domain(format!("soft threshold needs tau >= 0, got {tau}")));
    }
    Ok(x.iter().map(|&v| shrink(v, tau)).collect())
}

#[inline]
pub(crate) fn shrink(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

/// Output of [`tv_prox`]: the denoised vector plus the piecewise-constant
/// structure needed to differentiate through it.
#[derive(Debug, Clone, PartialEq)]
pub struct TautStringResult {
    pub z: Vec<f64>,
    /// `segment_support[i]` is true when a constant segment of `z` starts at
    /// `i`. Index 0 always starts the first segment (the `e₁ᵀ` row of `D̃`).
    pub segment_support: Vec<bool>,
    /// `sign((Dz)_i)` for every jump `i` (between `i` and `i + 1`), `0` where
    /// `z` is flat.
    pub jump_signs: Vec<i8>,
}

impl TautStringResult {
    fn from_output(z: Vec<f64>, full_support: bool) -> Self {
        let n = z.len();
        let thresh = JUMP_REL_TOL * (1.0 + norm_inf(&z));
        let mut segment_support = vec![false; n];
        let mut jump_signs = vec![0i8; n.saturating_sub(1)];
        if n > 0 {
            segment_support[0] = true;
        }
        for i in 0..n.saturating_sub(1) {
            let d = z[i + 1] - z[i];
            let is_jump = d.abs() > thresh;
            if is_jump || full_support {
                segment_support[i + 1] = true;
            }
            if is_jump {
                jump_signs[i] = if d > 0.0 { 1 } else { -1 };
            }
        }
        Self {
            z,
            segment_support,
            jump_signs,
        }
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Index ranges of the constant segments, left to right.
    pub fn segments(&self) -> Vec<Range<usize>> {
        let n = self.z.len();
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..n {
            if self.segment_support[i] {
                out.push(start..i);
                start = i;
            }
        }
        if n > 0 {
            out.push(start..n);
        }
        out
    }

    pub fn jump_count(&self) -> usize {
        self.jump_signs.iter().filter(|s| **s != 0).count()
    }
}

/// Exact minimizer of `mu‖Du‖₁ + ½‖u − x‖²`.
///
/// Condat's direct algorithm: a single left-to-right sweep that maintains
/// the tube bounds of the taut string and emits each constant segment once
/// its value is pinned. Linear in `n` on typical inputs.
pub fn tv_prox(x: &[f64], mu: f64) -> Result<TautStringResult> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::domain(format!("tv prox needs finite mu >= 0, got {mu}")));
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::domain(format!("non-finite input at index {i}")));
    }
    if mu == 0.0 || x.len() < 2 {
        return Ok(TautStringResult::from_output(x.to_vec(), true));
    }
    let z = condat(x, mu);
    Ok(TautStringResult::from_output(z, false))
}

fn condat(input: &[f64], lambda: f64) -> Vec<f64> {
    let n = input.len();
    let mut out = vec![0.0; n];
    let last = n - 1;
    let two_lambda = 2.0 * lambda;
    let neg_lambda = -lambda;

    // k: current sample, k0: start of the open segment, kplus/kminus: last
    // positions where the upper/lower tube bound was attained.
    let (mut k, mut k0, mut kplus, mut kminus) = (0usize, 0usize, 0usize, 0usize);
    // umin/umax: dual values along the lower/upper bounds.
    let (mut umin, mut umax) = (lambda, neg_lambda);
    let (mut vmin, mut vmax) = (input[0] - lambda, input[0] + lambda);

    loop {
        while k == last {
            if umin < 0.0 {
                // vmin too high: negative jump
                while k0 <= kminus {
                    out[k0] = vmin;
                    k0 += 1;
                }
                k = k0;
                kminus = k0;
                vmin = input[k];
                umin = lambda;
                umax = vmin + umin - vmax;
            } else if umax > 0.0 {
                // vmax too low: positive jump
                while k0 <= kplus {
                    out[k0] = vmax;
                    k0 += 1;
                }
                k = k0;
                kplus = k0;
                vmax = input[k];
                umax = neg_lambda;
                umin = vmax + umax - vmin;
            } else {
                vmin += umin / (k - k0 + 1) as f64;
                while k0 <= k {
                    out[k0] = vmin;
                    k0 += 1;
                }
                return out;
            }
        }
        umin += input[k + 1] - vmin;
        if umin < neg_lambda {
            while k0 <= kminus {
                out[k0] = vmin;
                k0 += 1;
            }
            k = k0;
            kplus = k0;
            kminus = k0;
            vmin = input[k];
            vmax = vmin + two_lambda;
            umin = lambda;
            umax = neg_lambda;
            continue;
        }
        umax += input[k + 1] - vmax;
        if umax > lambda {
            while k0 <= kplus {
                out[k0] = vmax;
                k0 += 1;
            }
            k = k0;
            kplus = k0;
            kminus = k0;
            vmax = input[k];
            vmin = vmax - two_lambda;
            umin = lambda;
            umax = neg_lambda;
            continue;
        }
        k += 1;
        if umin >= lambda {
            kminus = k;
            vmin += (umin - lambda) / (kminus - k0 + 1) as f64;
            umin = lambda;
        }
        if umax <= neg_lambda {
            kplus = k;
            vmax += (umax + lambda) / (kplus - k0 + 1) as f64;
            umax = neg_lambda;
        }
    }
}

/// Checks the optimality conditions of `z` as the TV prox of `x`.
///
/// The dual certificate is `w_i = Σ_{j≤i} (z_j − x_j)/mu`. Accepts when
/// `‖w‖_∞ ≤ 1 + tol`, `w_i = sign((Dz)_i)` on every jump, and the full sum
/// closes to zero, all within `tol`.
pub fn tv_prox_kkt_check(x: &[f64], mu: f64, z: &[f64], tol: f64) -> bool {
    tv_prox_kkt_residual(x, mu, z) <= tol
}

/// Largest violation among the conditions of [`tv_prox_kkt_check`];
/// infinite for mismatched lengths or a negative `mu`.
pub fn tv_prox_kkt_residual(x: &[f64], mu: f64, z: &[f64]) -> f64 {
    if x.len() != z.len() || x.iter().chain(z).any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    if mu == 0.0 {
        return x.iter().zip(z).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    }
    if !(mu > 0.0) {
        return f64::INFINITY;
    }
    let n = x.len();
    let thresh = JUMP_REL_TOL * (1.0 + norm_inf(z));
    let mut w = 0.0;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        w += (z[i] - x[i]) / mu;
        if i + 1 == n {
            return worst.max(w.abs());
        }
        worst = worst.max(w.abs() - 1.0);
        let d = z[i + 1] - z[i];
        if d.abs() > thresh {
            worst = worst.max((w - d.signum()).abs());
        }
    }
    worst
}

/// Prox of `λ₁‖x‖₁ + λ₂‖Dx‖₁`: soft threshold applied after the TV prox.
pub fn combined_prox(x: &[f64], lambda1: f64, lambda2: f64) -> Result<Vec<f64>> {
    if !(lambda1 >= 0.0) || !(lambda2 >= 0.0) {
        return Err(Error::domain(format!(
            "penalties must be nonnegative, got ({lambda1}, {lambda2})"
        )));
    }
    let t = tv_prox(x, lambda2)?;
    soft_threshold(&t.z, lambda1)
}

/// Gradient mapping of `f = ½‖Ax − y‖²` and `g₁ = λ₁‖·‖₁` with step `u`:
/// `(x − S_{λ₁u}(x − u∇f(x))) / u`.
pub fn gradient_mapping(problem: &SensingProblem, lambda1: f64, x: &[f64], u: f64) -> Result<Vec<f64>> {
    if !(u > 0.0) {
        return Err(Error::domain(format!("gradient mapping needs u > 0, got {u}")));
    }
    if !(lambda1 >= 0.0) {
        return Err(Error::domain(format!("lambda1 must be >= 0, got {lambda1}")));
    }
    problem.check_signal(x)?;
    let grad = problem.gradient(x);
    Ok(x.iter()
        .zip(&grad)
        .map(|(&xi, &gi)| (xi - shrink(xi - u * gi, lambda1 * u)) / u)
        .collect())
}

/// Vector–Jacobian product through [`tv_prox`].
///
/// `J_x` is the orthogonal projector onto vectors constant on each segment of
/// `z`, so `grad_x` is `upstream` averaged segment-wise. On a segment `[a, b)`
/// entered by jump sign `s_in` and left by `s_out`, `∂z/∂mu = (s_out − s_in)/(b − a)`.
/// Cost is `O(n)`; no dense matrix is formed.
pub fn tv_prox_jacobian_vjp(result: &TautStringResult, upstream: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = result.len();
    if upstream.len() != n {
        return Err(Error::size(format!(
            "upstream has length {}, prox output has {n}",
            upstream.len()
        )));
    }
    let mut grad_x = vec![0.0; n];
    let mut grad_mu = 0.0;
    for seg in result.segments() {
        let len = seg.len() as f64;
        let sum: f64 = upstream[seg.clone()].iter().sum();
        let mean = sum / len;
        grad_x[seg.clone()].iter_mut().for_each(|g| *g = mean);
        let s_in = if seg.start > 0 {
            result.jump_signs[seg.start - 1] as f64
        } else {
            0.0
        };
        let s_out = if seg.end < n {
            result.jump_signs[seg.end - 1] as f64
        } else {
            0.0
        };
        grad_mu += (s_out - s_in) * mean;
    }
    Ok((grad_x, grad_mu))
}
