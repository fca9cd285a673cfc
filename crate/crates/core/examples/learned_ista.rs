//! Train small LPGM-ISTA networks and compare them with the same number of
//! PGM-ISTA iterations.
//!
//! cargo run --release --example learned_ista

use l1tv::experiments::{eval_models, train_models, LearnedTaskConfig};
use l1tv::unrolled::TrainConfig;

fn main() -> l1tv::error::Result<()> {
    let cfg = LearnedTaskConfig {
        train_samples: 200,
        test_samples: 50,
        layers: vec![2, 4],
        train: TrainConfig {
            epochs: 60,
            ..Default::default()
        },
        ..Default::default()
    };
    let runs = train_models(&cfg)?;
    for r in &runs {
        let h = &r.history;
        println!(
            "L = {}: val loss {:.4} -> {:.4} (epoch {}), u {:.3e}, t {:.3e}, {:.1} s",
            r.layers, h.val_loss[0], h.val_loss[h.best_epoch], h.best_epoch, r.params.u, r.params.t, r.seconds
        );
    }
    let models: Vec<_> = runs.into_iter().map(|r| r.params).collect();
    let t = eval_models(&cfg, &models)?;
    let err = t.floats("mean_rel_err");
    for (i, row) in t.rows.iter().enumerate() {
        println!("{:>5} L = {}: mean RelErr {:.4}", row[0], row[1], err[i].unwrap());
    }
    Ok(())
}
