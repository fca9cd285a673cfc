//! Exact recovery from noiseless measurements with ADMM on the constrained
//! model.
//!
//! cargo run --release --example admm_exact

use l1tv::linalg::gaussian_matrix;
use l1tv::signals::{rel_err, sparsity_levels, synth_signal};
use l1tv::solvers::{admm_constrained, relative_feasibility, AdmmConfig, RegParams};

fn main() -> l1tv::error::Result<()> {
    let n = 200;
    let x = synth_signal(n, 40, 3, 11)?.values;
    let (s_r, s_g) = sparsity_levels(&x, 1e-12)?;
    println!("signal: n = {n}, s_r = {s_r}, s_g = {s_g}");

    let reg = RegParams::new(1e-3, 1.0)?;
    for m in [20, 60, 100, 120] {
        let a = gaussian_matrix(m, n, 12)?;
        let y = a.matvec(&x);
        let r = admm_constrained(&a, &y, &reg, &AdmmConfig::default())?;
        println!(
            "m = {m:3}: RelErr {:.2e}, feasibility {:.1e}, {} its",
            rel_err(&r.x, &x)?,
            relative_feasibility(&a, &y, &r.x),
            r.iterations
        );
    }
    Ok(())
}
