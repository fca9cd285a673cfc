//! How many Gaussian measurements a sparse, piecewise-constant signal needs.
//!
//! cargo run --example sample_bounds

use l1tv::bounds::{phi, phi_l1, phi_tv, recovery_error_bound, sample_bound, BoundQuery};

fn main() -> l1tv::error::Result<()> {
    let (n, s_r, s_g) = (1000, 100, 50);
    println!("n = {n}, s_r = {s_r}, s_g = {s_g}");
    println!("l1 only  Φ = {:7.1}", phi_l1(n, s_r)?);
    println!("TV only  Φ = {:7.1}", phi_tv(n, s_g)?);

    println!("\n λ1/λ2      Φ      m");
    for ratio in [0.0, 0.05, 0.1, 0.3, 1.0, 3.0] {
        let q = BoundQuery::new(n, s_r, s_g, ratio, 1.0, 1.0)?;
        let p = phi(&q)?;
        println!("{ratio:6.2} {p:8.1} {:6}", sample_bound(p, q.t)?);
    }

    // noisy measurements: error guarantee at twice the bound
    let p = phi(&BoundQuery::new(n, s_r, s_g, 1.0, 1.0, 1.0)?)?;
    let m = 2 * sample_bound(p, 1.0)?;
    println!(
        "\nm = {m}, ε = 0.1: ‖x̂ − x‖ ≤ {:.4}",
        recovery_error_bound(m, p, 1.0, 0.1)?
    );
    Ok(())
}
