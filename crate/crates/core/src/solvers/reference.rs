use crate::error::{Error, Result};
use crate::linalg::{self, forward_diff, forward_diff_adjoint};

use super::{objective, RegParams, SensingProblem, SolveResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceConfig {
    pub max_iter: usize,
    /// Stop when `‖x^{k+1} − x^k‖₂ ≤ tol·max(‖x^k‖₂, 1)`.
    pub tol: f64,
    /// Primal/dual step balance: `τ = balance/‖K‖`, `σ = 0.99/(balance·‖K‖)`.
    pub balance: f64,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        Self {
            max_iter: 2_000_000,
            tol: 1e-14,
            balance: 1.0,
        }
    }
}

/// Chambolle–Pock primal–dual iteration for
/// `min ½‖Ax − y‖² + ‖Kx‖₁` with `K = [λ₁I; λ₂D]`.
///
/// The dual variable lives in the box `[−1, 1]^{2n−1}`, so the only
/// nonsmooth step is a clip; `(I + τAᵀA)⁻¹` is formed once. Only the
/// final objective is recorded.
pub fn reference_solve(
    problem: &SensingProblem,
    reg: &RegParams,
    x0: &[f64],
    cfg: &ReferenceConfig,
) -> Result<SolveResult> {
    problem.check_signal(x0)?;
    let n = problem.n();
    let (l1, l2) = (reg.lambda1, reg.lambda2);
    let k_norm = (l1 * l1 + 4.0 * l2 * l2).sqrt();
    if k_norm == 0.0 {
        return Err(Error::domain("reference solver needs a nonzero penalty"));
    }
    if !(cfg.balance > 0.0) {
        return Err(Error::domain("balance must be positive"));
    }
    let tau = cfg.balance / k_norm;
    let sigma = 0.99 / (cfg.balance * k_norm);

    let mut system = problem.a().gram().to_nalgebra() * tau;
    for i in 0..n {
        system[(i, i)] += 1.0;
    }
    let inv = system
        .try_inverse()
        .ok_or_else(|| Error::Internal("I + τAᵀA is singular".into()))?;
    let inv: Vec<f64> = inv.transpose().iter().copied().collect(); // row-major
    let tau_aty: Vec<f64> = problem.a().matvec_t(problem.y()).iter().map(|v| tau * v).collect();

    let mut x = x0.to_vec();
    let mut x_bar = x.clone();
    let mut p1 = vec![0.0; n];
    let mut p2 = vec![0.0; n - 1];
    let mut rhs = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        // dual ascent + projection onto the unit box
        let dx = forward_diff(&x_bar);
        for (p, xb) in p1.iter_mut().zip(&x_bar) {
            *p = (*p + sigma * l1 * xb).clamp(-1.0, 1.0);
        }
        for (p, d) in p2.iter_mut().zip(&dx) {
            *p = (*p + sigma * l2 * d).clamp(-1.0, 1.0);
        }
        // primal step: prox of τf
        let dtp = forward_diff_adjoint(&p2);
        for i in 0..n {
            rhs[i] = x[i] - tau * (l1 * p1[i] + l2 * dtp[i]) + tau_aty[i];
        }
        let next: Vec<f64> = (0..n).map(|i| linalg::dot(&inv[i * n..(i + 1) * n], &rhs)).collect();
        for i in 0..n {
            x_bar[i] = 2.0 * next[i] - x[i];
        }
        iterations += 1;
        let step = linalg::dist2(&x, &next);
        let scale = linalg::norm2(&x).max(1.0);
        x = next;
        if step <= cfg.tol * scale {
            converged = true;
            break;
        }
    }

    let f = objective(problem, reg, &x);
    Ok(SolveResult {
        x,
        objective_history: vec![f],
        residual_history: Vec::new(),
        iterations,
        converged,
    })
}
