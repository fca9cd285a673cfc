use crate::error::{Error, Result};
use crate::linalg;
use crate::prox::{gradient_mapping, shrink, tv_prox};

use super::{objective, relative_change, RegParams, SensingProblem, SolveOptions, SolveResult, StepParams};

/// `u = safety · 2/‖A‖₂²`, `t = 0.9u`. `safety = 0.5` gives `u = 1/‖A‖₂²`.
pub fn default_step_params(problem: &SensingProblem, safety: f64) -> Result<StepParams> {
    if !(safety > 0.0 && safety < 1.0) {
        return Err(Error::domain(format!("safety must lie in (0, 1), got {safety}")));
    }
    let l = problem.spectral_norm_sq();
    if !(l > 0.0) {
        return Err(Error::domain("sensing matrix has zero spectral norm"));
    }
    let u = safety * 2.0 / l;
    Ok(StepParams { u, t: 0.9 * u })
}

/// One PGM-ISTA update:
/// `T_{λ₂t}((1 − t/u)x + (t/u)S_{λ₁u}(x − uAᵀ(Ax − y)))`.
pub fn pgm_step(problem: &SensingProblem, reg: &RegParams, steps: &StepParams, x: &[f64]) -> Vec<f64> {
    let (u, t) = (steps.u, steps.t);
    let grad = problem.gradient(x);
    let ratio = t / u;
    let w: Vec<f64> = x
        .iter()
        .zip(&grad)
        .map(|(&xi, &gi)| (1.0 - ratio) * xi + ratio * shrink(xi - u * gi, reg.lambda1 * u))
        .collect();
    // finite inputs and a nonnegative threshold cannot fail
    tv_prox(&w, reg.lambda2 * t).expect("tv prox on finite input").z
}

/// PGM-ISTA from `x0`. Stops when the relative iterate change drops below
/// `opts.tol` or after `opts.max_iter` updates.
pub fn pgm_ista(
    problem: &SensingProblem,
    reg: &RegParams,
    steps: &StepParams,
    x0: &[f64],
    opts: &SolveOptions,
) -> Result<SolveResult> {
    steps.validate(problem)?;
    problem.check_signal(x0)?;

    let mut x = x0.to_vec();
    let mut objective_history = Vec::new();
    let mut residual_history = Vec::new();
    if opts.record_history {
        objective_history.push(objective(problem, reg, &x));
    }
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let next = pgm_step(problem, reg, steps, &x);
        iterations += 1;
        let (step, rel) = relative_change(&x, &next);
        x = next;
        if opts.record_history {
            objective_history.push(objective(problem, reg, &x));
            residual_history.push(step);
        }
        if rel < opts.tol {
            converged = true;
            break;
        }
    }
    Ok(SolveResult {
        x,
        objective_history,
        residual_history,
        iterations,
        converged,
    })
}

/// `‖x − prox_{tg₂}(x − t·G_{1/u}(x))‖₂`, zero exactly at fixed points of
/// the iteration.
pub fn fixed_point_residual(problem: &SensingProblem, reg: &RegParams, steps: &StepParams, x: &[f64]) -> Result<f64> {
    steps.validate(problem)?;
    let g = gradient_mapping(problem, reg.lambda1, x, steps.u)?;
    let w: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - steps.t * gi).collect();
    let z = tv_prox(&w, reg.lambda2 * steps.t)?.z;
    Ok(linalg::dist2(x, &z))
}
