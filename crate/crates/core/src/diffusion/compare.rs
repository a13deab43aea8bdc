//! Scaled comparison between the discrete steady state and the diffusion
//! steady density.

use super::steady::solve_steady_density;
use crate::error::{Error, Result};
use crate::model::{DiffusionSpec, Env, StabilityCase};
use crate::steady_state::solve_steady;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: u64,
    pub q: f64,
    pub q1: f64,
    pub q2: f64,
    /// εW(εn).
    pub w: f64,
    /// εW₁(εn).
    pub w1: f64,
    /// εW₂(εn).
    pub w2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledComparison {
    pub epsilon: f64,
    pub rows: Vec<ComparisonRow>,
    /// max over the grid of |q_n − εW(εn)|.
    pub sup_norm: f64,
    /// max over the grid of |q_{n,i} − εWᵢ(εn)|, i = 1, 2.
    pub sup_norm_env: [f64; 2],
}

/// Tabulates q_n, q_{n,i} of the queue obtained by [`DiffusionSpec::scale_to_discrete`]
/// against εW(εn), εWᵢ(εn) on the grid `ns`.
pub fn compare_scaled(spec: &DiffusionSpec, epsilon: f64, ns: &[u64]) -> Result<ScaledComparison> {
    let spec = spec.validate()?;
    let queue = spec.scale_to_discrete(epsilon)?;
    for (name, case) in [("diffusion", spec.classify()), ("scaled queue", queue.classify())] {
        if case != StabilityCase::CaseIII {
            return Err(Error::UnsupportedRegime(format!(
                "comparison needs both switching rates positive with a steady state; the {name} model is {case:?}"
            )));
        }
    }
    let discrete = solve_steady(&queue)?;
    let density = solve_steady_density(&spec)?;
    let rows: Vec<ComparisonRow> = ns
        .iter()
        .map(|&n| {
            let x = epsilon * n as f64;
            let q1 = discrete.joint_pmf(n, Env::One);
            let q2 = discrete.joint_pmf(n, Env::Two);
            let w1 = epsilon * density.steady_density(x, Env::One);
            let w2 = epsilon * density.steady_density(x, Env::Two);
            ComparisonRow {
                n,
                q: q1 + q2,
                q1,
                q2,
                w: w1 + w2,
                w1,
                w2,
            }
        })
        .collect();
    let sup = |f: &dyn Fn(&ComparisonRow) -> f64| rows.iter().map(f).fold(0.0f64, f64::max);
    Ok(ScaledComparison {
        epsilon,
        sup_norm: sup(&|r| (r.q - r.w).abs()),
        sup_norm_env: [sup(&|r| (r.q1 - r.w1).abs()), sup(&|r| (r.q2 - r.w2).abs())],
        rows,
    })
}
