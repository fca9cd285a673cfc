//! Sample-complexity bounds for the ℓ¹-TV descent cone.
//!
//! [`phi`] is a closed-form upper bound on the statistical dimension of the
//! descent cone of `λ₁‖·‖₁ + λ₂‖D·‖₁` at a signal with `s_r` nonzeros and
//! `s_g` nonzero differences; [`sample_bound`] turns it into a measurement
//! count. [`mc_width_upper`] evaluates the subgradient construction behind
//! `phi` by Monte Carlo.

use std::f64::consts::{FRAC_2_PI, PI, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, forward_diff, forward_diff_adjoint, DenseMatrix};
use crate::rng;

/// Sparsity profile and penalty weights for which a bound is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundQuery {
    pub n: usize,
    pub s_r: usize,
    pub s_g: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Tail parameter of the sampling bound.
    pub t: f64,
}

impl BoundQuery {
    pub fn new(n: usize, s_r: usize, s_g: usize, lambda1: f64, lambda2: f64, t: f64) -> Result<Self> {
        let q = Self {
            n,
            s_r,
            s_g,
            lambda1,
            lambda2,
            t,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        let Self {
            n,
            s_r,
            s_g,
            lambda1,
            lambda2,
            t,
        } = *self;
        if n < 2 {
            return Err(Error::domain(format!("n must be at least 2, got {n}")));
        }
        if s_r > n || s_g > n - 1 {
            return Err(Error::domain(format!(
                "sparsity (s_r={s_r}, s_g={s_g}) out of range for n={n}"
            )));
        }
        if s_g > 2 * s_r {
            return Err(Error::domain(format!("s_g = {s_g} exceeds 2·s_r = {}", 2 * s_r)));
        }
        if !(lambda1 >= 0.0 && lambda2 >= 0.0 && lambda1.is_finite() && lambda2.is_finite()) {
            return Err(Error::domain("penalties must be finite and nonnegative"));
        }
        if lambda1 == 0.0 && lambda2 == 0.0 {
            return Err(Error::domain("λ₁ and λ₂ cannot both be zero"));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain(format!("t must be positive, got {t}")));
        }
        Ok(())
    }

    pub fn phi(&self) -> Result<f64> {
        phi(self)
    }
}

/// `n − (6/π)[λ₁(n−s_r) + √2λ₂(n−1−s_g)]² / [3nλ₁² + 4(2n+s_g−4)λ₂² + 12λ₁λ₂·min(s_r,s_g)]`.
///
/// Depends on the penalties only through `λ₁/λ₂`.
pub fn phi(q: &BoundQuery) -> Result<f64> {
    q.validate()?;
    let n = q.n as f64;
    let (sr, sg) = (q.s_r as f64, q.s_g as f64);
    let (l1, l2) = (q.lambda1, q.lambda2);
    let num = l1 * (n - sr) + SQRT_2 * l2 * (n - 1.0 - sg);
    let den = 3.0 * n * l1 * l1 + 4.0 * (2.0 * n + sg - 4.0) * l2 * l2 + 12.0 * l1 * l2 * sr.min(sg);
    if !(den > 0.0) {
        return Err(Error::domain(format!("nonpositive denominator {den} (n too small?)")));
    }
    Ok(n - (6.0 / PI) * num * num / den)
}

/// `n − (2/π)(n − s_r)²/n`, the ℓ¹-only bound.
pub fn phi_l1(n: usize, s_r: usize) -> Result<f64> {
    if n == 0 || s_r > n {
        return Err(Error::domain(format!(
            "need 0 <= s_r <= n, n > 0 (got n={n}, s_r={s_r})"
        )));
    }
    let (n, sr) = (n as f64, s_r as f64);
    Ok(n - FRAC_2_PI * (n - sr) * (n - sr) / n)
}

/// `2s_r·ln(n/s_r) + 2s_r`, the order-sharp ℓ¹ bound.
pub fn phi_l1_sharp(n: usize, s_r: usize) -> Result<f64> {
    if s_r == 0 || s_r >= n {
        return Err(Error::domain(format!("need 0 < s_r < n (got n={n}, s_r={s_r})")));
    }
    let (n, sr) = (n as f64, s_r as f64);
    Ok(2.0 * sr * (n / sr).ln() + 2.0 * sr)
}

/// `n − (3/π)(n − s_g − 1)²/(2n + s_g − 4)`, the TV-only bound.
pub fn phi_tv(n: usize, s_g: usize) -> Result<f64> {
    if n < 3 || s_g + 1 >= n {
        return Err(Error::domain(format!(
            "need n >= 3 and s_g < n-1 (got n={n}, s_g={s_g})"
        )));
    }
    let (n, sg) = (n as f64, s_g as f64);
    Ok(n - (3.0 / PI) * (n - sg - 1.0) * (n - sg - 1.0) / (2.0 * n + sg - 4.0))
}

/// Smallest integer `m` with `m > (√Φ + t)² + 1`.
pub fn sample_bound(phi: f64, t: f64) -> Result<u64> {
    if !(phi >= 0.0 && phi.is_finite()) || !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("need Φ >= 0 and t > 0 (got Φ={phi}, t={t})")));
    }
    let r = phi.sqrt() + t;
    Ok((r * r + 1.0).floor() as u64 + 1)
}

/// Which denominator [`recovery_error_bound_with`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ErrorBoundForm {
    /// `√(m−1) − √Φ − t`.
    #[default]
    Width,
    /// `√(m−1) − Φ − t`, as it is sometimes printed. Kept for comparison
    /// only; it mixes a width with a squared width.
    Raw,
}

/// `2ε / (√(m−1) − √Φ − t)`: with probability at least `1 − exp(−t²/2)`
/// the constrained minimizer is within this distance of the truth.
pub fn recovery_error_bound(m: u64, phi: f64, t: f64, eps: f64) -> Result<f64> {
    recovery_error_bound_with(m, phi, t, eps, ErrorBoundForm::Width)
}

pub fn recovery_error_bound_with(m: u64, phi: f64, t: f64, eps: f64, form: ErrorBoundForm) -> Result<f64> {
    if m < 1 || !(phi >= 0.0) || !(t > 0.0) || !(eps >= 0.0) {
        return Err(Error::domain(format!(
            "need m >= 1, Φ >= 0, t > 0, ε >= 0 (got {m}, {phi}, {t}, {eps})"
        )));
    }
    let width = match form {
        ErrorBoundForm::Width => phi.sqrt(),
        ErrorBoundForm::Raw => phi,
    };
    let den = ((m - 1) as f64).sqrt() - width - t;
    if !(den > 0.0) {
        return Err(Error::InfeasibleBound(format!(
            "√(m−1) − {} − t = {den} is not positive for m = {m}",
            if form == ErrorBoundForm::Width { "√Φ" } else { "Φ" }
        )));
    }
    Ok(2.0 * eps / den)
}

/// `‖Aᵀy‖_∞`: for `λ₁ ≥ λ_max` and `λ₂ ≥ 0` the regularized problem is
/// solved by zero.
pub fn lambda_max(a: &DenseMatrix, y: &[f64]) -> Result<f64> {
    if y.len() != a.rows() {
        return Err(Error::size(format!(
            "y has length {}, A has {} rows",
            y.len(),
            a.rows()
        )));
    }
    Ok(linalg::norm_inf(&a.matvec_t(y)))
}

/// Coefficients `(a, b, c)` of a quadratic `aρ² + bρ + c` in `ρ = λ₁/λ₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadCoeffs {
    pub fn eval(&self, rho: f64) -> f64 {
        (self.a * rho + self.b) * rho + self.c
    }
}

fn check_sparsity(n: usize, s_r: usize, s_g: usize) -> Result<()> {
    if n < 3 || s_r > n || s_g + 1 > n {
        return Err(Error::domain(format!("invalid sparsity (n={n}, s_r={s_r}, s_g={s_g})")));
    }
    Ok(())
}

/// The quadratic condition on `λ₁/λ₂` in its commonly quoted form:
/// `a = 2(n−s_r)²`, `b = 4√2(n−s_r)(n−1−s_g) + (3n + 12min(s_r,s_g))n₀`,
/// `c = 4(n−1−s_g)² + 4(2n+s_g−4)n₀`.
///
/// All three coefficients are nonnegative, so this quadratic is nonnegative
/// for every `ρ > 0` and does not by itself decide `Φ ≤ n₀`; see
/// [`lambda_ratio_coeffs_exact`] for that.
pub fn lambda_ratio_coeffs(n: usize, s_r: usize, s_g: usize, n0: f64) -> Result<QuadCoeffs> {
    check_sparsity(n, s_r, s_g)?;
    let (nf, sr, sg) = (n as f64, s_r as f64, s_g as f64);
    let a = 2.0 * (nf - sr) * (nf - sr);
    let b = 4.0 * SQRT_2 * (nf - sr) * (nf - 1.0 - sg) + (3.0 * nf + 12.0 * sr.min(sg)) * n0;
    let c = 4.0 * (nf - 1.0 - sg) * (nf - 1.0 - sg) + 4.0 * (2.0 * nf + sg - 4.0) * n0;
    Ok(QuadCoeffs { a, b, c })
}

/// Quadratic with `Φ(s_r, s_g) ≤ n₀ ⇔ aρ² + bρ + c ≥ 0` for `ρ = λ₁/λ₂ > 0`,
/// obtained by clearing the (positive) denominator of [`phi`]:
///
/// ```text
/// a = (6/π)(n−s_r)² − 3n(n−n₀)
/// b = (12√2/π)(n−s_r)(n−1−s_g) − 12·min(s_r,s_g)(n−n₀)
/// c = (12/π)(n−1−s_g)² − 4(2n+s_g−4)(n−n₀)
/// ```
pub fn lambda_ratio_coeffs_exact(n: usize, s_r: usize, s_g: usize, n0: f64) -> Result<QuadCoeffs> {
    check_sparsity(n, s_r, s_g)?;
    let (nf, sr, sg) = (n as f64, s_r as f64, s_g as f64);
    let gap = nf - n0;
    let a = (6.0 / PI) * (nf - sr) * (nf - sr) - 3.0 * nf * gap;
    let b = (12.0 * SQRT_2 / PI) * (nf - sr) * (nf - 1.0 - sg) - 12.0 * sr.min(sg) * gap;
    let c = (12.0 / PI) * (nf - 1.0 - sg) * (nf - 1.0 - sg) - 4.0 * (2.0 * nf + sg - 4.0) * gap;
    Ok(QuadCoeffs { a, b, c })
}

/// Sample mean and standard error of a Monte-Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// One draw: `min_{τ≥0} ‖g − τv‖²` with `v = λ₁z₁ + λ₂Dᵀz₂`, where `z₁`
/// takes `sign(x)` on the support and `sign(g)` off it, and `z₂` takes
/// `sign(Dx)` on the jump set and `sign(Dg)` off it.
fn width_draw(x: &[f64], dx: &[f64], g: &[f64], lambda1: f64, lambda2: f64) -> f64 {
    let dg = forward_diff(g);
    let z2: Vec<f64> = dx
        .iter()
        .zip(&dg)
        .map(|(&d, &e)| if d != 0.0 { sign(d) } else { sign(e) })
        .collect();
    let dtz2 = forward_diff_adjoint(&z2);
    let v: Vec<f64> = x
        .iter()
        .zip(g)
        .zip(&dtz2)
        .map(|((&xi, &gi), &di)| {
            let z1 = if xi != 0.0 { sign(xi) } else { sign(gi) };
            lambda1 * z1 + lambda2 * di
        })
        .collect();
    let gg = linalg::dot(g, g);
    let vv = linalg::dot(&v, &v);
    if vv == 0.0 {
        return gg;
    }
    let gv = linalg::dot(g, &v);
    let tau = (gv / vv).max(0.0);
    // ‖g − τv‖² = ‖g‖² − 2τ⟨g,v⟩ + τ²‖v‖²
    (gg - 2.0 * tau * gv + tau * tau * vv).max(0.0)
}

/// Monte-Carlo average of the per-draw distance in [`width_draw`] over
/// `trials` standard Gaussian vectors. Draw `i` uses substream `i` of
/// `seed`, and the reduction runs in draw order, so the result does not
/// depend on the thread count.
pub fn mc_width_upper(x: &[f64], lambda1: f64, lambda2: f64, trials: usize, seed: u64) -> Result<McEstimate> {
    if trials < 2 {
        return Err(Error::domain(format!("need at least 2 trials, got {trials}")));
    }
    if x.len() < 2 {
        return Err(Error::size("signal must have length >= 2"));
    }
    if !(lambda1 >= 0.0 && lambda2 >= 0.0) || (lambda1 == 0.0 && lambda2 == 0.0) {
        return Err(Error::domain("penalties must be nonnegative and not both zero"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("signal must be finite"));
    }
    let dx = forward_diff(x);
    let draws: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::substream(seed, i as u64);
            let g = rng::normal_vec(&mut r, x.len());
            width_draw(x, &dx, &g, lambda1, lambda2)
        })
        .collect();
    let k = trials as f64;
    let mean = draws.iter().sum::<f64>() / k;
    let var = draws.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (k - 1.0);
    Ok(McEstimate {
        mean,
        stderr: (var / k).sqrt(),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::{sparsity_levels, synth_signal};

    fn q(s_r: usize, s_g: usize, l1: f64, l2: f64) -> BoundQuery {
        BoundQuery::new(1000, s_r, s_g, l1, l2, 1.0).unwrap()
    }

    #[test]
    fn phi_first_table_cell() {
        assert_eq!(phi(&q(50, 25, 1.0, 1.0)).unwrap().ceil(), 92.0);
    }

    #[test]
    fn phi_by_hand() {
        // n=10, s_r=4, s_g=2, λ=(1,2): num = 6 + 2√2·7, den = 30 + 4·18·4 + 24·2
        let num = 6.0 + 2.0 * SQRT_2 * 7.0;
        let want = 10.0 - 6.0 / PI * num * num / (30.0 + 288.0 + 48.0);
        let got = phi(&BoundQuery::new(10, 4, 2, 1.0, 2.0, 1.0).unwrap()).unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn phi_is_scale_invariant() {
        let base = phi(&q(100, 50, 0.3, 0.7)).unwrap();
        for c in [1e-3, 0.5, 2.0, 1e4] {
            let scaled = phi(&q(100, 50, 0.3 * c, 0.7 * c)).unwrap();
            assert!((scaled - base).abs() <= 1e-12 * base);
        }
    }

    #[test]
    fn query_validation() {
        assert!(BoundQuery::new(100, 10, 21, 1.0, 1.0, 1.0).is_err());
        assert!(BoundQuery::new(100, 101, 2, 1.0, 1.0, 1.0).is_err());
        assert!(BoundQuery::new(100, 10, 5, 0.0, 0.0, 1.0).is_err());
        assert!(BoundQuery::new(100, 10, 5, 1.0, 1.0, 0.0).is_err());
        assert!(BoundQuery::new(100, 10, 5, 0.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn reductions() {
        for (s_r, s_g) in [(10, 5), (50, 25), (100, 200), (300, 10)] {
            let l1_only = phi(&q(s_r, s_g, 2.0, 0.0)).unwrap();
            assert!((l1_only - phi_l1(1000, s_r).unwrap()).abs() < 1e-10);
            let tv_only = phi(&q(s_r, s_g, 0.0, 3.0)).unwrap();
            assert!((tv_only - phi_tv(1000, s_g).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn phi_l1_values() {
        assert_eq!(phi_l1_sharp(1000, 50).unwrap().ceil(), 400.0);
        assert_eq!(phi_l1_sharp(1000, 150).unwrap().ceil(), 870.0);
        assert!(phi_l1_sharp(1000, 0).is_err());
        assert!(phi_l1_sharp(1000, 1000).is_err());
        for s in 0..=50 {
            assert!(phi_l1(50, s).unwrap() <= 50.0);
        }
        assert!(phi_l1(50, 10).unwrap() < 50.0);
    }

    #[test]
    fn phi_tv_values() {
        assert_eq!(phi_tv(1000, 25).unwrap().ceil(), 552.0);
        assert_eq!(phi_tv(1000, 75).unwrap().ceil(), 607.0);
        assert!(phi_tv(1000, 999).is_err());
        assert!(phi_tv(2, 0).is_err());
        let mut prev = phi_tv(1000, 0).unwrap();
        for s in 1..=998 {
            let v = phi_tv(1000, s).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn sample_bound_values() {
        assert_eq!(sample_bound(0.0, 1.0).unwrap(), 3);
        assert_eq!(sample_bound(92.0, 1.0).unwrap(), 114);
        assert_eq!(sample_bound(400.0, 2.0).unwrap(), 486);
        // (√Φ + t)² + 1 integral: strict inequality bumps by one
        assert_eq!(sample_bound(4.0, 1.0).unwrap(), 11);
        assert!(sample_bound(-1.0, 1.0).is_err());
        assert!(sample_bound(1.0, 0.0).is_err());
    }

    #[test]
    fn recovery_bound_values() {
        assert_eq!(recovery_error_bound(200, 92.0, 1.0, 0.0).unwrap(), 0.0);
        let want = 0.2 / (199f64.sqrt() - 92f64.sqrt() - 1.0);
        let got = recovery_error_bound(200, 92.0, 1.0, 0.1).unwrap();
        assert!((got - want).abs() < 1e-15);
        assert!((got - 0.056898).abs() < 1e-6);
        let mut prev = f64::INFINITY;
        for m in 120..400 {
            let v = recovery_error_bound(m, 92.0, 1.0, 0.1).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(matches!(
            recovery_error_bound(50, 92.0, 1.0, 0.1),
            Err(Error::InfeasibleBound(_))
        ));
        assert!(matches!(
            recovery_error_bound_with(200, 92.0, 1.0, 0.1, ErrorBoundForm::Raw),
            Err(Error::InfeasibleBound(_))
        ));
        let raw = recovery_error_bound_with(200, 4.0, 1.0, 0.1, ErrorBoundForm::Raw).unwrap();
        assert!((raw - 0.2 / (199f64.sqrt() - 5.0)).abs() < 1e-15);
    }

    #[test]
    fn lambda_max_values() {
        let a = DenseMatrix::identity(3);
        assert_eq!(lambda_max(&a, &[1.0, -4.0, 2.0]).unwrap(), 4.0);
        assert_eq!(lambda_max(&a, &[0.0; 3]).unwrap(), 0.0);
        assert!(lambda_max(&a, &[0.0; 2]).is_err());
    }

    #[test]
    fn quoted_coefficients() {
        let c = lambda_ratio_coeffs(1000, 50, 25, 400.0).unwrap();
        assert_eq!(c.a, 2.0 * 950.0 * 950.0);
        let b = 4.0 * SQRT_2 * 950.0 * 974.0 + (3000.0 + 300.0) * 400.0;
        assert!((c.b - b).abs() < 1e-6);
        assert_eq!(c.c, 4.0 * 974.0 * 974.0 + 4.0 * 2021.0 * 400.0);
        assert_eq!(lambda_ratio_coeffs(50, 50, 3, 10.0).unwrap().a, 0.0);
        for s_r in [0, 10, 500, 1000] {
            assert!(lambda_ratio_coeffs(1000, s_r, 0, 1.0).unwrap().a >= 0.0);
        }
    }

    #[test]
    fn exact_coefficients_decide_the_bound() {
        for (s_r, s_g, n0) in [(50, 25, 400.0), (100, 50, 300.0), (150, 150, 500.0), (50, 25, 95.0)] {
            let c = lambda_ratio_coeffs_exact(1000, s_r, s_g, n0).unwrap();
            for k in 1..=400 {
                let rho = k as f64 * 0.01;
                let p = phi(&q(s_r, s_g, rho, 1.0)).unwrap();
                let quad = c.eval(rho);
                if (p - n0).abs() > 1e-9 {
                    assert_eq!(p <= n0, quad >= 0.0, "s_r={s_r} s_g={s_g} n0={n0} rho={rho}");
                }
            }
        }
    }

    #[test]
    fn mc_zero_signal_pure_l1() {
        let x = vec![0.0; 30];
        let est = mc_width_upper(&x, 1.0, 0.0, 200, 5).unwrap();
        assert!(est.mean <= 30.0);
        // per draw: t = 0 is feasible, so no draw exceeds ‖g‖²
        let mut r = rng::substream(5, 3);
        let g = rng::normal_vec(&mut r, 30);
        let dx = forward_diff(&x);
        assert!(width_draw(&x, &dx, &g, 1.0, 0.0) <= linalg::dot(&g, &g));
    }

    #[test]
    fn mc_is_deterministic() {
        let x = synth_signal(100, 20, 1, 3).unwrap().values;
        let a = mc_width_upper(&x, 1.0, 1.0, 500, 11).unwrap();
        let b = mc_width_upper(&x, 1.0, 1.0, 500, 11).unwrap();
        assert_eq!(a, b);
        let c = mc_width_upper(&x, 1.0, 1.0, 500, 12).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn mc_matches_closed_form_without_tv() {
        // λ₂ = 0: E[‖g‖² − ⟨g,z₁⟩²/n] = n − 1 − (2/π)(n−s)(n−s−1)/n, which sits
        // just below the ℓ¹ bound (the τ ≥ 0 clip is never active here)
        let x = synth_signal(100, 20, 1, 8).unwrap().values;
        let (s_r, _) = sparsity_levels(&x, 0.0).unwrap();
        let (n, s) = (100.0, s_r as f64);
        let want = n - 1.0 - FRAC_2_PI * (n - s) * (n - s - 1.0) / n;
        let est = mc_width_upper(&x, 1.0, 0.0, 4000, 2).unwrap();
        assert!((est.mean - want).abs() < 4.0 * est.stderr, "{est:?} vs {want}");
        assert!(want < phi_l1(100, s_r).unwrap());
    }

    #[test]
    fn mc_argument_errors() {
        assert!(mc_width_upper(&[0.0; 4], 1.0, 1.0, 1, 0).is_err());
        assert!(mc_width_upper(&[0.0; 4], 0.0, 0.0, 10, 0).is_err());
        assert!(mc_width_upper(&[0.0; 1], 1.0, 0.0, 10, 0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn phi_sees_only_the_ratio(n in 10usize..2000, fr in 0.0f64..1.0, fg in 0.0f64..1.0,
                                   l1 in 0.01f64..10.0, l2 in 0.01f64..10.0, c in 0.1f64..100.0) {
            let s_r = ((fr * n as f64) as usize).max(1);
            let s_g = ((fg * (n - 2) as f64) as usize).min(2 * s_r);
            let a = phi(&BoundQuery::new(n, s_r, s_g, l1, l2, 1.0).unwrap()).unwrap();
            let b = phi(&BoundQuery::new(n, s_r, s_g, c * l1, c * l2, 1.0).unwrap()).unwrap();
            proptest::prop_assert!((a - b).abs() <= 1e-9 * n as f64);
            proptest::prop_assert!(a <= n as f64);
        }
    }
}
