//! Power iteration for ‖A‖₂ and ‖D‖₂, which set the PGM-ISTA step limits.
//!
//! cargo run --example spectral_norm

use l1tv::linalg::{gaussian_matrix, spectral_norm_default, DiffOperator};

fn main() -> l1tv::error::Result<()> {
    for (m, n) in [(20, 50), (50, 100), (100, 200)] {
        let a = gaussian_matrix(m, n, 1)?;
        let s = spectral_norm_default(&a);
        // roughly √m + √n for Gaussian entries
        let guess = (m as f64).sqrt() + (n as f64).sqrt();
        println!(
            "{m:3}x{n:<3} ‖A‖ = {:7.3} ({} its), √m+√n = {guess:.3}",
            s.value, s.iterations
        );
    }
    let d = DiffOperator::new(100)?;
    let s = d.operator_norm(1e-10, 100_000);
    println!("‖D‖ for n = 100: {:.6} (below 2)", s.value);
    Ok(())
}
