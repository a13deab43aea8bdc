//! Transition and first-passage densities of a Wiener process on the half-line.

use crate::error::{Error, Result};
use crate::model::{DiffusionSpec, Env};
use crate::numerics::exp_erfc;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Wiener process with drift β and infinitesimal variance ω².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WienerKernel {
    pub drift: f64,
    pub variance: f64,
}

impl WienerKernel {
    pub fn new(drift: f64, variance: f64) -> Result<Self> {
        if !drift.is_finite() || !(variance > 0.0) || !variance.is_finite() {
            return Err(Error::Validation(format!(
                "Wiener kernel needs finite drift and variance > 0, got β = {drift}, ω² = {variance}"
            )));
        }
        Ok(Self { drift, variance })
    }

    /// Kernel of the active environment `env`.
    pub fn of(spec: &DiffusionSpec, env: Env) -> Self {
        Self {
            drift: spec.drift(env),
            variance: spec.variance(env),
        }
    }

    fn gauss(&self, exponent_shift: f64, d: f64, t: f64) -> f64 {
        let v = self.variance * t;
        (exponent_shift - d * d / (2.0 * v)).exp() / (2.0 * PI * v).sqrt()
    }

    /// r̂(x, t | y) with 0 reflecting. Returns 0 for t ≤ 0.
    pub fn reflected_density(&self, x: f64, t: f64, y: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        let (b, w) = (self.drift, self.variance);
        let direct = self.gauss(0.0, x - y - b * t, t);
        let image = self.gauss(-2.0 * b * y / w, x + y - b * t, t);
        let boundary = if b == 0.0 {
            0.0
        } else {
            -(b / w) * exp_erfc(2.0 * b * x / w, (x + y + b * t) / (2.0 * w * t).sqrt())
        };
        direct + image + boundary
    }

    /// α̂(x, t | y) with 0 absorbing. Returns 0 for t ≤ 0.
    pub fn absorbed_density(&self, x: f64, t: f64, y: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        let b = self.drift;
        let direct = self.gauss(0.0, x - y - b * t, t);
        let image = self.gauss(-2.0 * b * y / self.variance, x + y - b * t, t);
        direct - image
    }

    /// ĝ(x, t | y), the density of the first passage from y down to x < y.
    pub fn passage_density(&self, x: f64, t: f64, y: f64) -> f64 {
        if !(t > 0.0) || !(x < y) {
            return 0.0;
        }
        (y - x) / t * self.gauss(0.0, x - y - self.drift * t, t)
    }

    /// ĝ(0, t | y).
    pub fn fpt_density(&self, t: f64, y: f64) -> f64 {
        self.passage_density(0.0, t, y)
    }
}

pub fn reflected_wiener_density(kernel: &WienerKernel, x: f64, t: f64, y: f64) -> f64 {
    kernel.reflected_density(x, t, y)
}

pub fn absorbed_wiener_density(kernel: &WienerKernel, x: f64, t: f64, y: f64) -> f64 {
    kernel.absorbed_density(x, t, y)
}

pub fn wiener_fpt_density(kernel: &WienerKernel, t: f64, y: f64) -> f64 {
    kernel.fpt_density(t, y)
}
