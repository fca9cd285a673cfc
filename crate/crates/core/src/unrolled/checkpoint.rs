//! Model checkpoints as JSON:
//!
//! ```text
//! {
//!   "format": "l1tv-lpgm",
//!   "version": 1,
//!   "n": 64, "m": 32, "layers": 2,
//!   "lambda1": 0.01, "lambda2": 0.05,
//!   "u": 0.0051, "t": 0.0046,
//!   "w_x": [...n·n numbers, row-major...],
//!   "w_y": [...n·m numbers, row-major...],
//!   "seed": 7
//! }
//! ```
//!
//! Floats are written with shortest round-trip formatting, so a checkpoint
//! reloads bit-exactly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

use super::NetParams;

pub const CHECKPOINT_FORMAT: &str = "l1tv-lpgm";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub m: usize,
    pub layers: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub u: f64,
    pub t: f64,
    pub w_x: Vec<f64>,
    pub w_y: Vec<f64>,
    /// Seed of the training run that produced the parameters.
    pub seed: u64,
}

impl Checkpoint {
    pub fn new(params: &NetParams, seed: u64) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            n: params.n(),
            m: params.m(),
            layers: params.layers,
            lambda1: params.lambda1,
            lambda2: params.lambda2,
            u: params.u,
            t: params.t,
            w_x: params.w_x.as_slice().to_vec(),
            w_y: params.w_y.as_slice().to_vec(),
            seed,
        }
    }

    pub fn into_params(self) -> Result<NetParams> {
        if self.format != CHECKPOINT_FORMAT {
            return Err(Error::Config(format!(
                "not an LPGM-ISTA checkpoint (format '{}')",
                self.format
            )));
        }
        if self.version != CHECKPOINT_VERSION {
            return Err(Error::Config(format!(
                "unsupported checkpoint version {}",
                self.version
            )));
        }
        let params = NetParams {
            w_x: DenseMatrix::new(self.n, self.n, self.w_x)?,
            w_y: DenseMatrix::new(self.n, self.m, self.w_y)?,
            u: self.u,
            t: self.t,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            layers: self.layers,
        };
        params.validate()?;
        Ok(params)
    }
}

pub fn save_checkpoint(path: impl AsRef<Path>, params: &NetParams, seed: u64) -> Result<()> {
    let text = serde_json::to_string_pretty(&Checkpoint::new(params, seed))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Loads parameters and the training seed.
pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<(NetParams, u64)> {
    let ck: Checkpoint = serde_json::from_str(&fs::read_to_string(path)?)?;
    let seed = ck.seed;
    Ok((ck.into_params()?, seed))
}
