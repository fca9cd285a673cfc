//! The TV proximal operator, its optimality certificate and its weak
//! Jacobian; plus the combined ℓ¹-TV prox.
//!
//! cargo run --example tv_prox

use l1tv::prox::{combined_prox, soft_threshold, tv_prox, tv_prox_jacobian_vjp, tv_prox_kkt_residual};
use l1tv::rng;

fn main() -> l1tv::error::Result<()> {
    // a noisy staircase
    let clean: Vec<f64> = (0..24).map(|i| [0.0, 2.0, -1.0, 0.5][i / 6]).collect();
    let mut r = rng::seeded(1);
    let x: Vec<f64> = clean.iter().map(|c| c + 0.3 * rng::standard_normal(&mut r)).collect();

    let res = tv_prox(&x, 0.8)?;
    println!("segments: {:?}", res.segments());
    println!("KKT residual: {:.1e}", tv_prox_kkt_residual(&x, 0.8, &res.z));
    for (xi, zi) in x.iter().zip(&res.z).take(8) {
        println!("  {xi:7.3} -> {zi:7.3}");
    }

    // vector-Jacobian product: averaging over segments, plus ∂z/∂μ
    let upstream = vec![1.0; x.len()];
    let (vjp, d_mu) = tv_prox_jacobian_vjp(&res, &upstream)?;
    println!("Jᵀ1 sums to {:.3}, dμ = {d_mu:.3}", vjp.iter().sum::<f64>());

    let z = combined_prox(&x, 0.4, 0.8)?;
    assert_eq!(z, soft_threshold(&res.z, 0.4)?);
    println!("combined prox zeros: {}", z.iter().filter(|v| **v == 0.0).count());
    Ok(())
}
