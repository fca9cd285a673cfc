//! Synthetic sparse and gradient-sparse signals, error metrics and CSV I/O.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::{self, Rng};

/// Length of each constant block in a synthetic signal.
pub const BLOCK_LEN: usize = 10;

/// Threshold below which entries and differences count as zero.
pub const DEFAULT_SPARSITY_TOL: f64 = 1e-12;

const PLACEMENT_RESTARTS: usize = 200;
const PLACEMENT_TRIES: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    pub values: Vec<f64>,
    pub seed: Option<u64>,
    pub target_sparsity: Option<usize>,
    pub blocks: Option<usize>,
}

impl Signal {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("signal entries must be finite"));
        }
        Ok(Self {
            values,
            seed: None,
            target_sparsity: None,
            blocks: None,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn nonzero_normal(rng: &mut Rng) -> f64 {
    loop {
        let v = rng::standard_normal(rng);
        if v != 0.0 {
            return v;
        }
    }
}

/// Start positions of `b` blocks, each followed and preceded by at least
/// one zero (except at the signal boundary).
fn place_blocks(n: usize, b: usize, rng: &mut Rng) -> Option<Vec<usize>> {
    if b == 0 {
        return Some(Vec::new());
    }
    if n < BLOCK_LEN {
        return None;
    }
    'restart: for _ in 0..PLACEMENT_RESTARTS {
        let mut starts: Vec<usize> = Vec::with_capacity(b);
        for _ in 0..b {
            let mut placed = false;
            for _ in 0..PLACEMENT_TRIES {
                let s = rng.random_range(0..=n - BLOCK_LEN);
                let clear = starts.iter().all(|&o| s > o + BLOCK_LEN || o > s + BLOCK_LEN);
                if clear {
                    starts.push(s);
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'restart;
            }
        }
        starts.sort_unstable();
        return Some(starts);
    }
    None
}

/// Signal of length `n` with exactly `s_r` nonzeros: `b` constant blocks of
/// length 10 and `s_r − 10b` single spikes, all amplitudes standard normal
/// (one draw per block), scaled so that `max|x| = 1`.
///
/// Blocks are separated from each other and from spikes by at least one
/// zero, so every block contributes two jumps (one at the boundary).
/// Spikes may sit next to each other.
pub fn synth_signal(n: usize, s_r: usize, b: usize, seed: u64) -> Result<Signal> {
    if BLOCK_LEN * b > s_r || s_r > n {
        return Err(Error::domain(format!(
            "need 10·b <= s_r <= n (got n={n}, s_r={s_r}, b={b})"
        )));
    }
    let mut rng = rng::seeded(seed);
    let starts = place_blocks(n, b, &mut rng)
        .ok_or_else(|| Error::Placement(format!("{b} separated blocks do not fit in n={n}")))?;

    let mut values = vec![0.0; n];
    // cells a spike may not use: block cells and their neighbours
    let mut blocked = vec![false; n];
    for &s in &starts {
        let amp = nonzero_normal(&mut rng);
        values[s..s + BLOCK_LEN].fill(amp);
        let lo = s.saturating_sub(1);
        let hi = (s + BLOCK_LEN + 1).min(n);
        blocked[lo..hi].fill(true);
    }
    let free: Vec<usize> = (0..n).filter(|&i| !blocked[i]).collect();
    let spikes = s_r - BLOCK_LEN * b;
    if spikes > free.len() {
        return Err(Error::Placement(format!(
            "{spikes} spikes requested but only {} free positions remain",
            free.len()
        )));
    }
    let mut chosen: Vec<usize> = index::sample(&mut rng, free.len(), spikes)
        .into_iter()
        .map(|k| free[k])
        .collect();
    chosen.sort_unstable();
    for i in chosen {
        values[i] = nonzero_normal(&mut rng);
    }

    let peak = linalg::norm_inf(&values);
    if peak > 0.0 {
        for v in &mut values {
            *v /= peak;
        }
    }
    Ok(Signal {
        values,
        seed: Some(seed),
        target_sparsity: Some(s_r),
        blocks: Some(b),
    })
}

/// `(s_r, s_g)`: entries with `|x_i| > tol` and differences with
/// `|x_{i+1} − x_i| > tol`.
pub fn sparsity_levels(x: &[f64], tol: f64) -> Result<(usize, usize)> {
    if !(tol >= 0.0) {
        return Err(Error::domain(format!("tol must be nonnegative, got {tol}")));
    }
    let s_r = x.iter().filter(|v| v.abs() > tol).count();
    let s_g = x.windows(2).filter(|w| (w[1] - w[0]).abs() > tol).count();
    Ok((s_r, s_g))
}

/// `‖x̂ − x*‖₂ / ‖x*‖₂`.
pub fn rel_err(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::size(format!(
            "lengths {} and {} differ",
            estimate.len(),
            truth.len()
        )));
    }
    let nt = linalg::norm2(truth);
    if nt == 0.0 {
        return Err(Error::domain("relative error against a zero reference"));
    }
    Ok(linalg::dist2(estimate, truth) / nt)
}

/// `y + σg` with `g` standard normal from `seed`.
pub fn add_noise(y: &[f64], sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("sigma must be nonnegative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(y.to_vec());
    }
    let mut rng = rng::seeded(seed);
    Ok(y.iter().map(|v| v + sigma * rng::standard_normal(&mut rng)).collect())
}

/// A named column of a signal CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedSignal {
    pub name: String,
    pub values: Vec<f64>,
}

impl NamedSignal {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            values,
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Io(std::io::Error::other(e.to_string())),
        _ => Error::Parse {
            line,
            msg: e.to_string(),
        },
    }
}

/// Reads signals stored one per column under a header row. Lines starting
/// with `#` are skipped.
pub fn read_csv<R: Read>(reader: R) -> Result<Vec<NamedSignal>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    let mut out: Vec<NamedSignal> = headers.iter().map(|h| NamedSignal::new(h, Vec::new())).collect();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        for (col, field) in out.iter_mut().zip(record.iter()) {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("column '{}': cannot parse '{field}' as a number", col.name),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    msg: format!("column '{}': non-finite value", col.name),
                });
            }
            col.values.push(v);
        }
    }
    Ok(out)
}

/// Writes equal-length signals one per column, 17 significant digits.
pub fn write_csv<W: Write>(writer: W, signals: &[NamedSignal]) -> Result<()> {
    let Some(first) = signals.first() else {
        return Ok(());
    };
    let len = first.values.len();
    if let Some(bad) = signals.iter().find(|s| s.values.len() != len) {
        return Err(Error::size(format!(
            "column '{}' has length {}, expected {len}",
            bad.name,
            bad.values.len()
        )));
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(signals.iter().map(|s| s.name.as_str()))
        .map_err(csv_error)?;
    for i in 0..len {
        w.write_record(signals.iter().map(|s| format!("{:.16e}", s.values[i])))
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv_file(path: impl AsRef<Path>) -> Result<Vec<NamedSignal>> {
    read_csv(File::open(path)?)
}

pub fn write_csv_file(path: impl AsRef<Path>, signals: &[NamedSignal]) -> Result<()> {
    write_csv(File::create(path)?, signals)
}
