//! Monte Carlo oracle: exact event-driven simulation of the switching queue
//! and Euler simulation of the switching reflected Wiener process.
//!
//! Every replication draws from its own ChaCha8 stream keyed by
//! `(seed, replication index)`, and results are folded in replication order,
//! so outputs do not depend on how many worker threads run them.

mod ctmc;
mod sde;

pub use ctmc::{
    estimate_steady_pmf, estimate_transient_pmf, sample_first_emptying, simulate_ctmc_path, CtmcPath,
    EventKind, PathEvent,
};
pub use sde::{
    estimate_diffusion_fpt, estimate_diffusion_stationary, estimate_diffusion_transient,
    simulate_diffusion_path, DiffusionHistogram, PathMode, PathOutcome,
};

use crate::error::{Error, Result};
use crate::model::Env;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub replications: u64,
    pub horizon: f64,
    #[serde(default)]
    pub burn_in: f64,
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub worker_hint: usize,
}

fn default_workers() -> usize {
    1
}

impl SimConfig {
    pub fn validate(&self) -> Result<Self> {
        if self.replications < 1 {
            return Err(Error::Validation("replications must be >= 1".into()));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::Validation(format!("horizon must be finite and > 0, got {}", self.horizon)));
        }
        if !(self.burn_in >= 0.0) || !(self.burn_in < self.horizon) {
            return Err(Error::Validation(format!(
                "burn_in must satisfy 0 <= burn_in < horizon, got {} with horizon {}",
                self.burn_in, self.horizon
            )));
        }
        if self.worker_hint < 1 {
            return Err(Error::Validation("worker_hint must be >= 1".into()));
        }
        Ok(*self)
    }
}

/// A Monte Carlo estimate with its standard error and the number of
/// independent units (replications or paths) it rests on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalEstimate {
    pub value: f64,
    pub std_error: f64,
    pub count: u64,
}

impl EmpiricalEstimate {
    /// Frequency `hits / n` with the binomial standard error.
    pub fn proportion(hits: u64, n: u64) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            value: p,
            std_error: (p * (1.0 - p) / n as f64).sqrt(),
            count: n,
        }
    }

    /// Sample mean with standard error s/√n; `count` is the number of samples.
    pub fn mean_of(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self {
                value: f64::NAN,
                std_error: f64::NAN,
                count: 0,
            };
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            value: mean,
            std_error: (var / n as f64).sqrt(),
            count: n as u64,
        }
    }

    /// |value − target| in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_error == 0.0 {
            return if self.value == target { 0.0 } else { f64::INFINITY };
        }
        (self.value - target).abs() / self.std_error
    }
}

/// Estimates of P(level = n, environment = i), indexed by level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalPmf {
    pub env1: Vec<EmpiricalEstimate>,
    pub env2: Vec<EmpiricalEstimate>,
    /// Diagnostics such as a burn-in shorter than the relaxation scale.
    pub warnings: Vec<String>,
}

impl EmpiricalPmf {
    /// Estimate at `(n, env)`; levels never observed report zero.
    pub fn get(&self, n: u64, env: Env) -> EmpiricalEstimate {
        let v = match env {
            Env::One => &self.env1,
            Env::Two => &self.env2,
        };
        let count = self.env1.first().or(self.env2.first()).map_or(0, |e| e.count);
        v.get(n as usize).copied().unwrap_or(EmpiricalEstimate {
            value: 0.0,
            std_error: 0.0,
            count,
        })
    }

    /// Largest level with an estimate in either environment.
    pub fn max_level(&self) -> u64 {
        self.env1.len().max(self.env2.len()).saturating_sub(1) as u64
    }
}

/// Samples of a first-passage time, censored at the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstPassageSample {
    /// Uncensored passage times in replication order.
    pub times: Vec<f64>,
    pub replications: u64,
    /// Replications stopped by the horizon or by the escape level.
    pub censored: u64,
    /// Fraction of replications that reached 0.
    pub completion: EmpiricalEstimate,
    /// Mean of the uncensored times.
    pub mean: EmpiricalEstimate,
}

impl FirstPassageSample {
    fn from_outcomes(outcomes: Vec<Option<f64>>) -> Self {
        let replications = outcomes.len() as u64;
        let times: Vec<f64> = outcomes.into_iter().flatten().collect();
        let hits = times.len() as u64;
        Self {
            completion: EmpiricalEstimate::proportion(hits, replications),
            mean: EmpiricalEstimate::mean_of(&times),
            censored: replications - hits,
            replications,
            times,
        }
    }

    pub fn censored_fraction(&self) -> f64 {
        self.censored as f64 / self.replications as f64
    }
}

pub(crate) fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

const CHUNK: u64 = 256;

/// Runs `job(index)` for every index in `0..count` on `workers` threads and
/// returns the results in index order.
pub(crate) fn run_replications<T, F>(count: u64, workers: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    use rayon::prelude::*;
    let chunks = count.div_ceil(CHUNK);
    let work = || -> Vec<T> {
        (0..chunks)
            .into_par_iter()
            .flat_map_iter(|c| (c * CHUNK..((c + 1) * CHUNK).min(count)).map(&job))
            .collect()
    };
    if workers <= 1 {
        return (0..count).map(&job).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    }
}

/// Standard error of the grand mean from batch means.
pub(crate) fn batch_means(batches: &[f64]) -> EmpiricalEstimate {
    let b = batches.len();
    let mean = batches.iter().sum::<f64>() / b as f64;
    let var = batches.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (b as f64 - 1.0).max(1.0);
    EmpiricalEstimate {
        value: mean,
        std_error: (var / b as f64).sqrt(),
        count: 0,
    }
}

/// Number of batches each steady-state path is cut into.
pub const BATCHES_PER_PATH: usize = 20;
