//! Oracles shared by the integration tests and the acceptance target. None
//! of them call the code they check, apart from the TV prox inside the
//! hand-written PGM-ISTA iteration (checked on its own).
#![allow(dead_code)]

use l1tv::linalg::{gaussian_matrix, DenseMatrix};
use l1tv::prox::{soft_threshold, tv_prox};
use l1tv::rng;
use l1tv::solvers::{
    objective, pgm_ista, reference_solve, ReferenceConfig, RegParams, SensingProblem, SolveOptions, StepParams,
};
use l1tv::unrolled::{backward, forward, init_params, NetParams, Tape};

fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `½‖z − x‖² + λ₁‖z‖₁ + λ₂‖Dz‖₁`
pub fn prox_objective(z: &[f64], x: &[f64], l1: f64, l2: f64) -> f64 {
    let mut f = 0.0;
    for i in 0..z.len() {
        f += 0.5 * (z[i] - x[i]).powi(2) + l1 * z[i].abs();
        if i + 1 < z.len() {
            f += l2 * (z[i + 1] - z[i]).abs();
        }
    }
    f
}

/// `Dᵀw` for the forward difference `(Dz)_i = z_{i+1} − z_i`.
pub fn dt(w: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (i, wi) in w.iter().enumerate() {
        out[i] -= wi;
        out[i + 1] += wi;
    }
    out
}

/// Projected gradient on the dual `max_{‖w‖∞≤1} ½‖x‖² − ½‖x − μDᵀw‖²`.
/// Returns the dual point; its value lower-bounds the prox objective.
pub fn tv_dual_oracle(x: &[f64], mu: f64, iters: usize) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n - 1];
    // ‖D‖² ≤ 4
    let step = 1.0 / (4.0 * mu * mu);
    for _ in 0..iters {
        let dtw = dt(&w, n);
        let z: Vec<f64> = x.iter().zip(&dtw).map(|(a, b)| a - mu * b).collect();
        for i in 0..n - 1 {
            // gradient of the dual objective in w is μ·Dz
            w[i] = (w[i] + step * mu * (z[i + 1] - z[i])).clamp(-1.0, 1.0);
        }
    }
    w
}

pub fn tv_dual_value(x: &[f64], mu: f64, w: &[f64]) -> f64 {
    let dtw = dt(w, x.len());
    let xx: f64 = x.iter().map(|v| v * v).sum();
    let r: f64 = x.iter().zip(&dtw).map(|(a, b)| (a - mu * b).powi(2)).sum();
    0.5 * xx - 0.5 * r
}

/// Best objective of the subgradient method with step `1/k` on the
/// 1-strongly convex prox objective, started at `x`.
pub fn subgradient_reference(x: &[f64], l1: f64, l2: f64, steps: usize) -> f64 {
    let n = x.len();
    let mut z = x.to_vec();
    let mut best = prox_objective(&z, x, l1, l2);
    let mut g = vec![0.0; n];
    for k in 1..=steps {
        for i in 0..n {
            g[i] = z[i] - x[i] + l1 * sgn(z[i]);
        }
        for i in 0..n - 1 {
            let s = sgn(z[i + 1] - z[i]);
            g[i] -= l2 * s;
            g[i + 1] += l2 * s;
        }
        let step = 1.0 / k as f64;
        for i in 0..n {
            z[i] -= step * g[i];
        }
        best = best.min(prox_objective(&z, x, l1, l2));
    }
    best
}

/// Instance `seed` of the subgradient comparison: n ≤ 20, moderate penalties.
pub fn subgradient_instance(seed: u64) -> (Vec<f64>, f64, f64) {
    let mut r = rng::seeded(seed + 500);
    let n = 2 + (seed as usize * 7) % 19;
    let x = rng::normal_vec(&mut r, n);
    let l1 = 0.05 + 0.0125 * seed as f64;
    let l2 = 0.1 + 0.01 * ((7 * seed) % 20) as f64;
    (x, l1, l2)
}

/// Minimizer of `f` over ℝ³ by a grid on [−3, 3]³ refined five times
/// around the best point.
pub fn grid_search_3(f: impl Fn(&[f64; 3]) -> f64) -> (f64, [f64; 3]) {
    let mut center = [0.0; 3];
    let (mut half, mut pts) = (3.0, 121usize);
    let mut best = (f64::INFINITY, center);
    for _ in 0..6 {
        let h = 2.0 * half / (pts - 1) as f64;
        for i in 0..pts {
            for j in 0..pts {
                for k in 0..pts {
                    let z = [
                        center[0] - half + i as f64 * h,
                        center[1] - half + j as f64 * h,
                        center[2] - half + k as f64 * h,
                    ];
                    let v = f(&z);
                    if v < best.0 {
                        best = (v, z);
                    }
                }
            }
        }
        center = best.1;
        half = 2.0 * h;
        pts = 41;
    }
    best
}

/// Random noiseless instance with n ≤ 32.
pub fn solver_instance(seed: u64) -> (SensingProblem, RegParams) {
    let mut r = rng::seeded(seed);
    let n = 8 + (seed as usize * 5) % 25;
    let m = (n * 2) / 3;
    let a = gaussian_matrix(m, n, seed).unwrap();
    let x = rng::normal_vec(&mut r, n);
    let y = a.matvec(&x);
    let lam = 0.02 * (1 + seed % 4) as f64;
    (
        SensingProblem::new(a, y).unwrap(),
        RegParams::new(lam, 2.0 * lam).unwrap(),
    )
}

/// `F(x_pgm) − F(x_ref)` after PGM-ISTA continued in `u` down to
/// `0.003/‖A‖²`, `t = 0.9u`, warm-started. The fixed point sits O(u) away
/// from the minimizer, so one step size cannot reach 1e-5.
pub fn pgm_reference_gap(seed: u64) -> f64 {
    let (p, reg) = solver_instance(seed);
    let reference = reference_solve(&p, &reg, &vec![0.0; p.n()], &ReferenceConfig::default()).unwrap();
    let f_ref = objective(&p, &reg, &reference.x);
    let l = p.spectral_norm_sq();
    let mut x = vec![0.0; p.n()];
    for c in [1.0, 0.1, 0.01, 3e-3] {
        let u = c / l;
        let opts = SolveOptions {
            record_history: false,
            ..SolveOptions::new(20_000_000, 1e-15)
        };
        x = pgm_ista(&p, &reg, &StepParams { u, t: 0.9 * u }, &x, &opts).unwrap().x;
    }
    objective(&p, &reg, &x) - f_ref
}

/// One iteration written out from the definition: gradient step,
/// soft threshold, relaxation, TV prox.
pub fn pgm_iteration(a: &DenseMatrix, y: &[f64], l1: f64, l2: f64, u: f64, t: f64, x: &[f64]) -> Vec<f64> {
    let r: Vec<f64> = a.matvec(x).iter().zip(y).map(|(p, q)| p - q).collect();
    let g = a.matvec_t(&r);
    let v: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - u * gi).collect();
    let s = soft_threshold(&v, l1 * u).unwrap();
    let w: Vec<f64> = x
        .iter()
        .zip(&s)
        .map(|(xi, si)| (1.0 - t / u) * xi + (t / u) * si)
        .collect();
    tv_prox(&w, l2 * t).unwrap().z
}

/// Largest entrywise gap between an initialized network of depth `L` and
/// `L` hand-written PGM-ISTA iterations, over `L = 1..=max_layers`.
pub fn forward_pgm_gap(seed: u64, max_layers: usize) -> f64 {
    let a = gaussian_matrix(8, 12, 40 + seed).unwrap();
    let y = rng::normal_vec(&mut rng::seeded(seed), 8);
    let reg = RegParams::new(0.05, 0.1).unwrap();
    let problem = SensingProblem::new(a.clone(), y.clone()).unwrap();
    let p = init_params(&problem, &reg, max_layers).unwrap();
    let mut x = vec![0.0; 12];
    let mut worst: f64 = 0.0;
    for layers in 1..=max_layers {
        x = pgm_iteration(&a, &y, 0.05, 0.1, p.u, p.t, &x);
        let (xn, _) = forward(&p.with_layers(layers), &y, false).unwrap();
        for (a, b) in x.iter().zip(&xn) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

/// Network off the PGM-ISTA initialization with n = 12, m = 8.
pub fn jittered_net(seed: u64, layers: usize) -> (NetParams, Vec<f64>, Vec<f64>) {
    let (n, m) = (12, 8);
    let a = gaussian_matrix(m, n, seed).unwrap();
    let mut r = rng::substream(seed, 9);
    let x = rng::normal_vec(&mut r, n);
    let y = a.matvec(&x);
    let problem = SensingProblem::new(a, y.clone()).unwrap();
    let mut p = init_params(&problem, &RegParams::new(0.3, 0.5).unwrap(), layers).unwrap();
    for v in p.w_x.as_mut_slice() {
        *v += 0.01 * rng::standard_normal(&mut r);
    }
    let su = 0.01 * p.u;
    for v in p.w_y.as_mut_slice() {
        *v += su * rng::standard_normal(&mut r);
    }
    (p, y, x)
}

fn sq_loss(p: &NetParams, y: &[f64], x: &[f64]) -> (f64, Tape) {
    let (xh, tape) = forward(p, y, true).unwrap();
    (xh.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum(), tape)
}

/// Same active sets and prox segmentations in every layer.
fn same_pattern(a: &Tape, b: &Tape) -> bool {
    a.layers.iter().zip(&b.layers).all(|(p, q)| {
        p.mask == q.mask && p.prox.segment_support == q.prox.segment_support && p.prox.jump_signs == q.prox.jump_signs
    })
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let s: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    d / (s + 1e-12)
}

/// Central differences of the loss in every parameter (`u`, `t` relative);
/// `None` when a probe changes the piecewise structure.
fn finite_differences(p: &NetParams, y: &[f64], x: &[f64], h: f64) -> Option<[Vec<f64>; 4]> {
    let (_, base) = sq_loss(p, y, x);
    let probe = |q: &NetParams| {
        let (f, tape) = sq_loss(q, y, x);
        same_pattern(&base, &tape).then_some(f)
    };
    let mut out: [Vec<f64>; 4] = Default::default();
    for k in 0..p.w_x.as_slice().len() {
        let (mut a, mut b) = (p.clone(), p.clone());
        a.w_x.as_mut_slice()[k] += h;
        b.w_x.as_mut_slice()[k] -= h;
        out[0].push((probe(&a)? - probe(&b)?) / (2.0 * h));
    }
    for k in 0..p.w_y.as_slice().len() {
        let (mut a, mut b) = (p.clone(), p.clone());
        a.w_y.as_mut_slice()[k] += h;
        b.w_y.as_mut_slice()[k] -= h;
        out[1].push((probe(&a)? - probe(&b)?) / (2.0 * h));
    }
    let hu = h * p.u;
    let (a, b) = (
        NetParams {
            u: p.u + hu,
            ..p.clone()
        },
        NetParams {
            u: p.u - hu,
            ..p.clone()
        },
    );
    out[2].push((probe(&a)? - probe(&b)?) / (2.0 * hu));
    let ht = h * p.t;
    let (a, b) = (
        NetParams {
            t: p.t + ht,
            ..p.clone()
        },
        NetParams {
            t: p.t - ht,
            ..p.clone()
        },
    );
    out[3].push((probe(&a)? - probe(&b)?) / (2.0 * ht));
    Some(out)
}

/// Per-group errors `[W_x, W_y, u, t]` of the backward pass against central
/// differences on the first `count` instances with a stable pattern,
/// cycling through `L = 1, 2, 4`.
pub fn screened_gradient_errors(count: usize) -> Vec<(usize, [f64; 4])> {
    let mut out = Vec::new();
    let mut seed = 1000u64;
    while out.len() < count {
        assert!(
            seed < 1000 + 10 * count as u64 + 100,
            "too few instances with a stable pattern"
        );
        let layers = [1, 2, 4][out.len() % 3];
        let (p, y, x) = jittered_net(seed, layers);
        seed += 1;
        let Some(fd) = finite_differences(&p, &y, &x, 1e-6) else {
            continue;
        };
        let (xh, tape) = forward(&p, &y, true).unwrap();
        let g: Vec<f64> = xh.iter().zip(&x).map(|(a, b)| 2.0 * (a - b)).collect();
        let an = backward(&p, &tape, &g).unwrap();
        out.push((
            layers,
            [
                rel(an.w_x.as_slice(), &fd[0]),
                rel(an.w_y.as_slice(), &fd[1]),
                rel(&[an.u], &fd[2]),
                rel(&[an.t], &fd[3]),
            ],
        ));
    }
    out
}
