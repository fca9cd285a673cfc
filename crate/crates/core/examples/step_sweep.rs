//! How the two PGM-ISTA step sizes trade off: iterations until the
//! objective gap falls under a threshold.
//!
//! cargo run --release --example step_sweep

use l1tv::experiments::{ut_sweep, UtSweepConfig};

fn main() -> l1tv::error::Result<()> {
    let cfg = UtSweepConfig {
        u_fracs: vec![0.2, 0.5, 0.8],
        t_fracs: vec![0.25, 0.5, 1.0],
        iterations: 500,
        ..Default::default()
    };
    let s = ut_sweep(&cfg)?;
    println!("F* = {:.6}", s.f_star);
    println!("u/(2/L)  t/u   first below {}", cfg.threshold);
    let (uf, tf, first) = (
        s.summary.floats("u_frac"),
        s.summary.floats("t_frac"),
        s.summary.floats("first_below"),
    );
    for i in 0..first.len() {
        let hit = first[i].map_or("never".to_string(), |k| k.to_string());
        println!("{:7.2} {:5.2}   {hit}", uf[i].unwrap(), tf[i].unwrap());
    }
    Ok(())
}
