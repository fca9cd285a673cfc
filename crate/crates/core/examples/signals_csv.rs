//! Synthetic sparse, piecewise-constant signals and the CSV round trip.
//!
//! cargo run --example signals_csv

use l1tv::signals::{read_csv, sparsity_levels, synth_signal, write_csv, NamedSignal};

fn main() -> l1tv::error::Result<()> {
    let signals: Vec<NamedSignal> = (0..3)
        .map(|i| synth_signal(60, 12, 1, i).map(|s| NamedSignal::new(format!("x{i}"), s.values)))
        .collect::<Result<_, _>>()?;
    for s in &signals {
        let (s_r, s_g) = sparsity_levels(&s.values, 1e-12)?;
        println!("{}: s_r = {s_r}, s_g = {s_g}", s.name);
    }

    let mut buf = Vec::new();
    write_csv(&mut buf, &signals)?;
    let back = read_csv(buf.as_slice())?;
    assert!(back.iter().zip(&signals).all(|(a, b)| a.values == b.values));
    println!("{} bytes, round trip exact", buf.len());
    print!(
        "{}",
        String::from_utf8_lossy(&buf)
            .lines()
            .take(4)
            .collect::<Vec<_>>()
            .join("\n")
    );
    println!();
    Ok(())
}
