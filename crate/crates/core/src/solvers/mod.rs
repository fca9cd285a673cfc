//! Solvers for the ℓ¹-TV recovery models.
//!
//! * [`pgm_ista`]: proximal gradient-mapping iteration for the regularized
//!   problem `min ½‖y − Ax‖² + λ₁‖x‖₁ + λ₂‖Dx‖₁`.
//! * [`admm_constrained`]: ADMM for `min λ₁‖x‖₁ + λ₂‖Dx‖₁  s.t.  Ax = y`.
//! * [`reference_solve`]: primal–dual (Chambolle–Pock) solver for the
//!   regularized problem that touches neither the TV prox nor the soft
//!   threshold; used as an independent reference for objective gaps.

mod admm;
mod pgm;
mod reference;

pub use admm::{admm_constrained, relative_feasibility, AdmmConfig};
pub use pgm::{default_step_params, fixed_point_residual, pgm_ista, pgm_step};
pub use reference::{reference_solve, ReferenceConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, norm1, tv_norm, DenseMatrix};

/// Sensing matrix, measurements and the cached `‖A‖₂²`.
#[derive(Debug, Clone)]
pub struct SensingProblem {
    a: DenseMatrix,
    y: Vec<f64>,
    spectral_norm_sq: f64,
}

impl SensingProblem {
    pub fn new(a: DenseMatrix, y: Vec<f64>) -> Result<Self> {
        let (m, n) = a.shape();
        if m == 0 || n < 2 {
            return Err(Error::size(format!("need m >= 1 and n >= 2, got {m}x{n}")));
        }
        if y.len() != m {
            return Err(Error::size(format!("y has length {}, A has {m} rows", y.len())));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("measurements must be finite"));
        }
        let s = linalg::spectral_norm_default(&a);
        Ok(Self {
            a,
            y,
            spectral_norm_sq: s.value * s.value,
        })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn spectral_norm_sq(&self) -> f64 {
        self.spectral_norm_sq
    }

    /// Same matrix, different measurements (spectral norm is reused).
    pub fn with_measurements(&self, y: Vec<f64>) -> Result<Self> {
        if y.len() != self.m() {
            return Err(Error::size(format!(
                "y has length {}, A has {} rows",
                y.len(),
                self.m()
            )));
        }
        Ok(Self {
            a: self.a.clone(),
            y,
            spectral_norm_sq: self.spectral_norm_sq,
        })
    }

    /// `Ax − y`.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.a.matvec(x);
        for (ri, yi) in r.iter_mut().zip(&self.y) {
            *ri -= yi;
        }
        r
    }

    /// `∇f(x) = Aᵀ(Ax − y)`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.a.matvec_t(&self.residual(x))
    }

    pub(crate) fn check_signal(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::size(format!(
                "x has length {}, A has {} columns",
                x.len(),
                self.n()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegParams {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl RegParams {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        if !(lambda1 >= 0.0 && lambda1.is_finite()) || !(lambda2 >= 0.0 && lambda2.is_finite()) {
            return Err(Error::domain(format!(
                "penalties must be finite and nonnegative, got ({lambda1}, {lambda2})"
            )));
        }
        Ok(Self { lambda1, lambda2 })
    }

    /// `λ₁‖x‖₁ + λ₂‖Dx‖₁`.
    pub fn penalty(&self, x: &[f64]) -> f64 {
        self.lambda1 * norm1(x) + self.lambda2 * tv_norm(x)
    }
}

/// Step pair of PGM-ISTA: `u` for the ℓ¹ gradient mapping, `t` for the TV prox.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepParams {
    pub u: f64,
    pub t: f64,
}

impl StepParams {
    /// Requires `u ∈ (0, 2/‖A‖₂²)` and `t ∈ (0, u]`, the range with
    /// guaranteed convergence.
    pub fn validate(&self, problem: &SensingProblem) -> Result<()> {
        let u_max = 2.0 / problem.spectral_norm_sq();
        if !(self.u > 0.0 && self.u < u_max) {
            return Err(Error::domain(format!("u = {} outside (0, {u_max})", self.u)));
        }
        if !(self.t > 0.0 && self.t <= self.u) {
            return Err(Error::domain(format!("t = {} outside (0, u = {}]", self.t, self.u)));
        }
        Ok(())
    }

    /// Whether `t < 3u/4`, the regime of the objective-error bound.
    pub fn in_error_bound_regime(&self) -> bool {
        self.t < 0.75 * self.u
    }
}

/// Iteration limits shared by the iterative solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Relative iterate change `‖x⁺ − x‖/max(‖x‖, 1)` below which a run stops.
    pub tol: f64,
    /// With `false`, histories are left empty (for timing runs).
    pub record_history: bool,
}

impl SolveOptions {
    pub fn new(max_iter: usize, tol: f64) -> Self {
        Self {
            max_iter,
            tol,
            record_history: true,
        }
    }
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self::new(10_000, 1e-8)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub x: Vec<f64>,
    /// Objective at `x⁰, x¹, …` (length `iterations + 1` when recorded).
    pub objective_history: Vec<f64>,
    /// `‖x^{k+1} − x^k‖₂` per iteration.
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// `½‖y − Ax‖² + λ₁‖x‖₁ + λ₂‖Dx‖₁`.
pub fn objective(problem: &SensingProblem, reg: &RegParams, x: &[f64]) -> f64 {
    let r = problem.residual(x);
    0.5 * linalg::dot(&r, &r) + reg.penalty(x)
}

pub(crate) fn relative_change(prev: &[f64], next: &[f64]) -> (f64, f64) {
    let step = linalg::dist2(prev, next);
    (step, step / linalg::norm2(prev).max(1.0))
}
