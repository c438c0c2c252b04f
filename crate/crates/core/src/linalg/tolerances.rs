use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numeric policy threaded through every operation.
///
/// All thresholds are relative: rank decisions scale with the largest singular
/// value and matrix size, PSD and equality slacks scale with the operator norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative singular-value cutoff for kernels and ranges.
    pub rank: f64,
    /// Allowed negative eigenvalue slack in Loewner comparisons and square roots.
    pub psd: f64,
    /// Matrix-equality slack (relative Frobenius).
    pub eq: f64,
    /// Iteration cap for iterative constructions.
    pub max_iter: usize,
    /// Stopping threshold for iterative constructions.
    pub conv: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rank: 1e-10, psd: 1e-9, eq: 1e-9, max_iter: 10_000, conv: 1e-12 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let fields = [("rank", self.rank), ("psd", self.psd), ("eq", self.eq), ("conv", self.conv)];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTolerances(format!("{name} must be finite and positive, got {v}")));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidTolerances("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    /// Every slack divided by `factor`; used for boundary rechecks.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            rank: self.rank / factor,
            psd: self.psd / factor,
            eq: self.eq / factor,
            max_iter: self.max_iter,
            conv: self.conv / factor,
        }
    }
}
