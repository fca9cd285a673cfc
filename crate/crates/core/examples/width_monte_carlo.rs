//! Monte-Carlo estimate of the statistical-dimension bound next to Φ.
//!
//! cargo run --release --example width_monte_carlo

use l1tv::bounds::{mc_width_upper, phi, BoundQuery};
use l1tv::signals::{sparsity_levels, synth_signal};

fn main() -> l1tv::error::Result<()> {
    let n = 100;
    let x = synth_signal(n, 20, 1, 3)?.values;
    let (s_r, s_g) = sparsity_levels(&x, 1e-12)?;
    println!("n = {n}, s_r = {s_r}, s_g = {s_g}");
    println!(" λ1    λ2      MC mean  ± stderr      Φ");
    for (l1, l2) in [(0.0, 1.0), (0.1, 1.0), (0.3, 1.0), (1.0, 1.0), (1.0, 0.0)] {
        let est = mc_width_upper(&x, l1, l2, 2000, 4)?;
        let p = phi(&BoundQuery::new(n, s_r, s_g, l1, l2, 1.0)?)?;
        println!("{l1:4.1} {l2:5.1} {:12.2} {:9.2} {p:9.2}", est.mean, est.stderr);
    }
    Ok(())
}
