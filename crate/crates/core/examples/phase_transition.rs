//! Success rate of exact recovery against the sampling ratio, with the
//! sample count Φ predicts.
//!
//! cargo run --release --example phase_transition

use l1tv::experiments::{phase, PhaseConfig};

fn main() -> l1tv::error::Result<()> {
    let cfg = PhaseConfig {
        n: 100,
        s_r: 20,
        blocks: 2,
        ratios: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
        trials: 10,
        ..Default::default()
    };
    let t = phase(&cfg)?;
    let ratio = t.floats("ratio");
    let frac = t.floats("success_fraction");
    let bound = t.floats("m_bound");
    println!("ratio   m   success  (bound m = {})", bound[0].unwrap());
    for (i, m) in t.floats("m").iter().enumerate() {
        println!("{:5.2} {:4} {:8.2}", ratio[i].unwrap(), m.unwrap(), frac[i].unwrap());
    }
    Ok(())
}
