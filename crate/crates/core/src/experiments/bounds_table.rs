use serde::{Deserialize, Serialize};

use crate::bounds::{phi, phi_l1_sharp, phi_tv, sample_bound, BoundQuery};
use crate::error::{Error, Result};

use super::Table;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundsTableConfig {
    pub n: usize,
    /// `(s_r, s_g)` pairs, one row per pair and ratio.
    pub cells: Vec<(usize, usize)>,
    /// Values of `λ₁/λ₂`; `λ₂` is fixed at 1.
    pub ratios: Vec<f64>,
    /// Deviation parameter of the sample count.
    pub t: f64,
}

impl Default for BoundsTableConfig {
    /// n = 1000 with the six sparsity pairs and the two ratios of the
    /// comparison table (`--table1`).
    fn default() -> Self {
        Self {
            n: 1000,
            cells: vec![(50, 25), (50, 50), (100, 50), (100, 100), (150, 75), (150, 150)],
            ratios: vec![1.0, 0.1],
            t: 1.0,
        }
    }
}

/// `Φ_ℓ¹` (order-sharp form), `Φ_TV` and `Φ` per cell and ratio, with
/// their ceilings and the sample count `m` that `Φ` implies.
pub fn bounds_table(cfg: &BoundsTableConfig) -> Result<Table> {
    if cfg.cells.is_empty() || cfg.ratios.is_empty() {
        return Err(Error::Config("need at least one cell and one ratio".into()));
    }
    let mut table = Table::new(&[
        "ratio",
        "n",
        "s_r",
        "s_g",
        "phi_l1",
        "phi_l1_ceil",
        "phi_tv",
        "phi_tv_ceil",
        "phi",
        "phi_ceil",
        "m_bound",
    ]);
    for &ratio in &cfg.ratios {
        if !(ratio >= 0.0 && ratio.is_finite()) {
            return Err(Error::Config(format!(
                "ratio must be finite and nonnegative, got {ratio}"
            )));
        }
        for &(s_r, s_g) in &cfg.cells {
            let l1 = phi_l1_sharp(cfg.n, s_r)?;
            let tv = phi_tv(cfg.n, s_g)?;
            let p = phi(&BoundQuery::new(cfg.n, s_r, s_g, ratio, 1.0, cfg.t)?)?;
            table.push(vec![
                ratio.into(),
                cfg.n.into(),
                s_r.into(),
                s_g.into(),
                l1.into(),
                (l1.ceil() as u64).into(),
                tv.into(),
                (tv.ceil() as u64).into(),
                p.into(),
                (p.ceil() as u64).into(),
                sample_bound(p, cfg.t)?.into(),
            ]);
        }
    }
    Ok(table)
}
