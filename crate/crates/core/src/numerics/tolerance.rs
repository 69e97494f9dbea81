use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative thresholds shared by every numerical decision in the crate.
///
/// `rank_rel` is the singular-value cutoff used by rank, pseudoinverse and
/// range tests alike, so that all of them agree on what "in the range" means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub rank_rel: f64,
    pub psd_rel: f64,
    pub residual_rel: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_rel: 1e-10,
            psd_rel: 1e-9,
            residual_rel: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn new(rank_rel: f64, psd_rel: f64, residual_rel: f64) -> Result<Self> {
        let tol = Self {
            rank_rel,
            psd_rel,
            residual_rel,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("rank_rel", self.rank_rel),
            ("psd_rel", self.psd_rel),
            ("residual_rel", self.residual_rel),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} = {value} must lie strictly between 0 and 1"
                )));
            }
        }
        Ok(())
    }
}
