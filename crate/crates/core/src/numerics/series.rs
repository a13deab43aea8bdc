use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Stop rule for [`sum_series`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSettings {
    pub tail_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesSettings {
    fn default() -> Self {
        Self {
            tail_tol: 1e-12,
            max_terms: 100_000,
        }
    }
}

impl SeriesSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tol > 0.0) || self.max_terms < 1 {
            return Err(Error::Domain(format!(
                "series settings need tail_tol > 0 and max_terms >= 1: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Number of consecutive sub-tolerance terms that ends a summation.
pub const QUIET_RUN: usize = 5;

/// Sums `term(start) + term(start + 1) + ...` until [`QUIET_RUN`] consecutive
/// terms each have magnitude below `tail_tol`.
pub fn sum_series<F: FnMut(i64) -> f64>(
    mut term: F,
    start: i64,
    settings: &SeriesSettings,
) -> Result<f64> {
    settings.validate()?;
    let mut sum = 0.0;
    let mut quiet = 0;
    for i in 0..settings.max_terms {
        let t = term(start + i as i64);
        sum += t;
        if t.abs() < settings.tail_tol {
            quiet += 1;
            if quiet == QUIET_RUN {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::SeriesNonConvergence {
        terms: settings.max_terms,
        partial: sum,
    })
}
