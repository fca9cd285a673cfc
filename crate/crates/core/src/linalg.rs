//! Dense linear algebra on row-major `f64` storage, the forward-difference
//! operator and spectral-norm estimation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::size(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite entry at flat index {i}")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Aᵀ v`.
    pub fn matvec_t(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                axpy(vi, self.row(i), &mut out);
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `AᵀA` (cols × cols).
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                let ri = row[i];
                if ri == 0.0 {
                    continue;
                }
                let gi = &mut g.data[i * n..(i + 1) * n];
                axpy(ri, row, gi);
            }
        }
        g
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `self - other`, shapes must agree.
    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.shape(), other.shape());
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Rank-one update `self += alpha · u vᵀ`.
    pub fn add_outer(&mut self, alpha: f64, u: &[f64], v: &[f64]) {
        debug_assert_eq!(u.len(), self.rows);
        debug_assert_eq!(v.len(), self.cols);
        for (i, &ui) in u.iter().enumerate() {
            if ui != 0.0 {
                let row = &mut self.data[i * self.cols..(i + 1) * self.cols];
                axpy(alpha * ui, v, row);
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

/// Matrix with i.i.d. standard normal entries drawn row by row from `seed`.
pub fn gaussian_matrix(m: usize, n: usize, seed: u64) -> Result<DenseMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::size(format!("gaussian matrix must be non-empty, got {m}x{n}")));
    }
    let mut rng = rng::seeded(seed);
    Ok(DenseMatrix {
        rows: m,
        cols: n,
        data: rng::normal_vec(&mut rng, m * n),
    })
}

// ---------------------------------------------------------------------------
// vector helpers

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `y += alpha · x`.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// forward differences

/// Forward-difference operator `D ∈ R^{(n−1)×n}`, `(Dx)_i = x_{i+1} − x_i`.
///
/// Never materialized; `‖D‖₂ ≤ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiffOperator {
    n: usize,
}

impl DiffOperator {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::size(format!("difference operator needs n >= 2, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::size(format!("D expects length {}, got {}", self.n, x.len())));
        }
        Ok(forward_diff(x))
    }

    pub fn adjoint(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() + 1 != self.n {
            return Err(Error::size(format!(
                "Dᵀ expects length {}, got {}",
                self.n - 1,
                v.len()
            )));
        }
        Ok(forward_diff_adjoint(v))
    }

    /// Power-iteration estimate of `‖D‖₂`.
    pub fn operator_norm(&self, tol: f64, max_iter: usize) -> SpectralNorm {
        power_iteration(self.n, |x| forward_diff_adjoint(&forward_diff(x)), tol, max_iter)
    }
}

/// `Dx` for `x` of length `n ≥ 2`.
pub fn diff_apply(x: &[f64]) -> Result<Vec<f64>> {
    DiffOperator::new(x.len())?.apply(x)
}

/// `Dᵀv` for `v` of length `n − 1 ≥ 1`.
pub fn diff_adjoint(v: &[f64]) -> Result<Vec<f64>> {
    DiffOperator::new(v.len() + 1)?.adjoint(v)
}

pub(crate) fn forward_diff(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

pub(crate) fn forward_diff_adjoint(v: &[f64]) -> Vec<f64> {
    let n = v.len() + 1;
    let mut out = vec![0.0; n];
    for (i, &vi) in v.iter().enumerate() {
        out[i] -= vi;
        out[i + 1] += vi;
    }
    out
}

/// `‖Dx‖₁`.
pub fn tv_norm(x: &[f64]) -> f64 {
    x.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

// ---------------------------------------------------------------------------
// spectral norm

pub const SPECTRAL_TOL: f64 = 1e-6;
pub const SPECTRAL_MAX_ITER: usize = 10_000;
const POWER_START_SEED: u64 = 0x5eed_0fd1ff;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralNorm {
    /// Best estimate of the largest singular value.
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Largest singular value of `a` by power iteration on `AᵀA`.
///
/// Iteration stops once the estimate moves by less than `tol/10` relative,
/// which keeps the final error inside `tol` for the Rayleigh quotient.
/// A zero matrix reports `0` and `converged = true`.
pub fn spectral_norm(a: &DenseMatrix, tol: f64, max_iter: usize) -> SpectralNorm {
    power_iteration(a.cols(), |x| a.matvec_t(&a.matvec(x)), tol, max_iter)
}

pub fn spectral_norm_default(a: &DenseMatrix) -> SpectralNorm {
    spectral_norm(a, SPECTRAL_TOL, SPECTRAL_MAX_ITER)
}

fn power_iteration(dim: usize, normal_op: impl Fn(&[f64]) -> Vec<f64>, tol: f64, max_iter: usize) -> SpectralNorm {
    let mut rng = rng::seeded(POWER_START_SEED);
    let mut v = rng::normal_vec(&mut rng, dim);
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut sigma = 0.0_f64;
    for it in 1..=max_iter {
        let w = normal_op(&v);
        // Rayleigh quotient of AᵀA at unit v.
        let lambda = dot(&v, &w).max(0.0);
        let next = lambda.sqrt();
        let nw = norm2(&w);
        if nw == 0.0 {
            return SpectralNorm {
                value: next,
                converged: true,
                iterations: it,
            };
        }
        let change = (next - sigma).abs();
        sigma = next;
        v = w.into_iter().map(|x| x / nw).collect();
        if it > 1 && change <= 0.1 * tol * sigma {
            return SpectralNorm {
                value: sigma,
                converged: true,
                iterations: it,
            };
        }
    }
    SpectralNorm {
        value: sigma,
        converged: false,
        iterations: max_iter,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diff_of_small_vector() {
        assert_eq!(diff_apply(&[0.0, 1.0, 3.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(diff_apply(&[2.5; 7]).unwrap(), vec![0.0; 6]);
    }

    #[test]
    fn diff_length_errors() {
        assert!(matches!(diff_apply(&[1.0]), Err(Error::Size(_))));
        let d = DiffOperator::new(4).unwrap();
        assert!(d.apply(&[1.0, 2.0]).is_err());
        assert!(d.adjoint(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn adjoint_identity_on_random_pairs() {
        let mut rng = rng::seeded(11);
        for k in 0..100 {
            let n = 2 + k % 40;
            let x = rng::normal_vec(&mut rng, n);
            let v = rng::normal_vec(&mut rng, n - 1);
            let lhs = dot(&diff_apply(&x).unwrap(), &v);
            let rhs = dot(&x, &diff_adjoint(&v).unwrap());
            assert!((lhs - rhs).abs() <= 1e-12 * (norm2(&x) * norm2(&v) + 1.0));
        }
    }

    #[test]
    fn diff_norm_bounded_by_two() {
        for n in 2..=512 {
            let s = DiffOperator::new(n).unwrap().operator_norm(1e-6, 10_000);
            assert!(s.value <= 2.0, "n={n} norm={}", s.value);
        }
    }

    #[test]
    fn gaussian_matrix_is_seeded() {
        let a = gaussian_matrix(1, 1, 42).unwrap();
        let b = gaussian_matrix(1, 1, 42).unwrap();
        assert_eq!(a.as_slice()[0].to_bits(), b.as_slice()[0].to_bits());
        let c = gaussian_matrix(3, 2, 1).unwrap();
        let d = gaussian_matrix(3, 2, 2).unwrap();
        assert_ne!(c, d);
        assert!(gaussian_matrix(0, 3, 1).is_err());
    }

    #[test]
    fn gaussian_matrix_moments() {
        let a = gaussian_matrix(200, 400, 7).unwrap();
        let n = a.as_slice().len() as f64;
        let mean = a.as_slice().iter().sum::<f64>() / n;
        let var = a.as_slice().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 4.0 / n.sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.1, "var {var}");
    }

    #[test]
    fn spectral_norm_simple_cases() {
        let s = spectral_norm_default(&DenseMatrix::identity(3));
        assert!((s.value - 1.0).abs() <= 1e-6 && s.converged);
        let s = spectral_norm_default(&DenseMatrix::diag(&[3.0, 1.0]));
        assert!((s.value - 3.0).abs() <= 3e-6);
    }

    #[test]
    fn spectral_norm_matches_svd() {
        let a = gaussian_matrix(10, 20, 3).unwrap();
        let svd = a.to_nalgebra().svd(false, false);
        let smax = svd.singular_values.max();
        let s = spectral_norm_default(&a);
        assert!(s.converged);
        assert!((s.value - smax).abs() <= 1e-6 * smax, "{} vs {smax}", s.value);
    }

    #[test]
    fn spectral_norm_reports_non_convergence() {
        // two nearly equal top singular values slow the iteration down
        let a = DenseMatrix::diag(&[1.0, 1.0 - 1e-9, 0.5]);
        let s = spectral_norm(&a, 1e-14, 3);
        assert!(!s.converged);
        assert_eq!(s.iterations, 3);
        assert!(s.value > 0.5 && s.value <= 1.0 + 1e-12);
    }

    #[test]
    fn gram_and_transpose() {
        let a = gaussian_matrix(4, 3, 9).unwrap();
        let g = a.gram();
        let at = a.transpose();
        for i in 0..3 {
            for j in 0..3 {
                let want: f64 = (0..4).map(|r| at.get(i, r) * a.get(r, j)).sum();
                assert!((g.get(i, j) - want).abs() < 1e-12);
            }
        }
        let x = [1.0, -2.0, 0.5];
        let ax = a.matvec(&x);
        let y = [0.3, 0.1, -1.0, 2.0];
        assert!((dot(&ax, &y) - dot(&x, &a.matvec_t(&y))).abs() < 1e-12);
    }
}
