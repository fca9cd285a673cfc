//! Backpropagation through LPGM-ISTA against finite differences, and a
//! deliberately broken backward pass for contrast.
//!
//! cargo run --release --example gradient_check

use l1tv::linalg::gaussian_matrix;
use l1tv::rng;
use l1tv::solvers::{RegParams, SensingProblem};
use l1tv::unrolled::{grad_check_with, init_params, Fault};

fn main() -> l1tv::error::Result<()> {
    let (n, m) = (12, 8);
    let a = gaussian_matrix(m, n, 5)?;
    let x = rng::normal_vec(&mut rng::seeded(6), n);
    let y = a.matvec(&x);
    let problem = SensingProblem::new(a, y.clone())?;
    let reg = RegParams::new(0.3, 0.5)?;
    for layers in [1, 2, 4] {
        let net = init_params(&problem, &reg, layers)?;
        let ok = grad_check_with(&net, &y, &x, 1e-6, Fault::None)?;
        let bad = grad_check_with(&net, &y, &x, 1e-6, Fault::FlipProxThresholdSign)?;
        println!(
            "L = {layers}: max rel err {:.1e} (W_x {:.1e}, u {:.1e}, t {:.1e}); flipped sign {:.1e}",
            ok.max_rel_err, ok.w_x, ok.u, ok.t, bad.max_rel_err
        );
    }
    Ok(())
}
