//! Steady-state densities of the alternating reflected diffusion.

use crate::error::{Error, Result};
use crate::model::{DiffusionSpec, Env, StabilityCase};
use crate::numerics::{eval_cubic, solve_cubic};
use crate::steady_state::GeneralizedMixture;
use serde::{Deserialize, Serialize};

/// Roots of P*(z) with ξ₁* > ξ₂* > 0 > ξ₃*.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicRootsDiffusion {
    pub xi1s: f64,
    pub xi2s: f64,
    pub xi3s: f64,
}

/// Coefficients `[c3, c2, c1, c0]` of P*(z).
pub fn characteristic_cubic_diffusion(spec: &DiffusionSpec) -> [f64; 4] {
    let (w1, w2) = (spec.omega1_sq, spec.omega2_sq);
    let (b1, b2) = (spec.drift(Env::One), spec.drift(Env::Two));
    let (e1, e2) = (spec.eta1, spec.eta2);
    [
        w1 * w2,
        2.0 * (w1 * b2 + w2 * b1),
        -2.0 * (w1 * e2 - 2.0 * b1 * b2 + w2 * e1),
        -4.0 * (e1 * b2 + e2 * b1),
    ]
}

/// Residual of P* at `z`, scaled by the largest coefficient.
pub fn scaled_residual_diffusion(spec: &DiffusionSpec, z: f64) -> f64 {
    let c = characteristic_cubic_diffusion(spec);
    let cmax = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    eval_cubic(c, z).abs() / (cmax * z.abs().max(1.0).powi(3))
}

/// Roots of P* classified as ξ₁* > ξ₂* > 0 > ξ₃*.
pub fn diffusion_roots(spec: &DiffusionSpec) -> Result<CubicRootsDiffusion> {
    let c = characteristic_cubic_diffusion(spec);
    let r = solve_cubic(c[0], c[1], c[2], c[3])?.0;
    let pos: Vec<f64> = r.iter().copied().filter(|&z| z > 0.0).collect();
    let neg: Vec<f64> = r.iter().copied().filter(|&z| z < 0.0).collect();
    if pos.len() != 2 || neg.len() != 1 {
        return Err(Error::RootClassification(format!(
            "expected two positive roots and one negative root, got {r:?}"
        )));
    }
    let roots = CubicRootsDiffusion {
        xi1s: pos[0].max(pos[1]),
        xi2s: pos[0].min(pos[1]),
        xi3s: neg[0],
    };
    let gap = roots.xi1s - roots.xi2s;
    if gap < 1e-8 * roots.xi1s.max(1.0) {
        return Err(Error::ConfluentRoots { gap });
    }
    Ok(roots)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyDensitySolution {
    pub case: StabilityCase,
    pub roots: Option<CubicRootsDiffusion>,
    /// Conditional density of X given E = i, for i = 1, 2.
    pub env_mixtures: [GeneralizedMixture; 2],
    /// P(E = i).
    pub env_probs: [f64; 2],
    /// Limits of W₁(x) and W₂(x) as x → 0⁺.
    pub w0: [f64; 2],
    pub spec: DiffusionSpec,
}

pub fn solve_steady_density(spec: &DiffusionSpec) -> Result<SteadyDensitySolution> {
    let spec = spec.validate()?;
    let case = spec.classify();
    match case {
        StabilityCase::NoSteadyState => Err(Error::NoSteadyState(format!(
            "η₁(μ₂*−λ₂*)+η₂(μ₁*−λ₁*) = {} with η₁ = {}, η₂ = {}",
            spec.drift_balance(),
            spec.eta1,
            spec.eta2
        ))),
        StabilityCase::CaseI | StabilityCase::CaseII => {
            let live = if case == StabilityCase::CaseI { Env::Two } else { Env::One };
            let rate = -2.0 * spec.drift(live) / spec.variance(live);
            let exp = GeneralizedMixture::exponential(1.0, rate, rate);
            let mut env_probs = [0.0; 2];
            let mut w0 = [0.0; 2];
            env_probs[live.index() - 1] = 1.0;
            w0[live.index() - 1] = rate;
            Ok(SteadyDensitySolution {
                case,
                roots: None,
                env_mixtures: [exp, exp],
                env_probs,
                w0,
                spec,
            })
        }
        StabilityCase::CaseIII => {
            let roots = diffusion_roots(&spec)?;
            let CubicRootsDiffusion { xi1s, xi2s, xi3s } = roots;
            let w = [spec.omega1_sq, spec.omega2_sq];
            let gap = [-spec.drift(Env::One), -spec.drift(Env::Two)];
            let eta = [spec.eta1, spec.eta2];
            let s = spec.drift_balance();
            let eta_sum = eta[0] + eta[1];
            let mut mixtures = [GeneralizedMixture::exponential(0.0, 0.0, 0.0); 2];
            let mut w0 = [0.0; 2];
            let mut env_probs = [0.0; 2];
            for i in 0..2 {
                let o = 1 - i;
                let a = 4.0 * s / (w[0] * w[1] * xi1s * xi3s * (xi1s - xi2s))
                    * (w[o] * (xi1s + xi3s) - 2.0 * gap[o])
                    / (w[o] * xi3s - 2.0 * gap[o]);
                mixtures[i] = GeneralizedMixture::exponential(a, xi1s, xi2s);
                w0[i] = 4.0 * eta[o] * s / (w[i] * xi3s * (w[o] * xi3s - 2.0 * gap[o]) * eta_sum);
                env_probs[i] = eta[o] / eta_sum;
            }
            Ok(SteadyDensitySolution {
                case,
                roots: Some(roots),
                env_mixtures: mixtures,
                env_probs,
                w0,
                spec,
            })
        }
    }
}

impl SteadyDensitySolution {
    pub fn env_prob(&self, env: Env) -> f64 {
        self.env_probs[env.index() - 1]
    }

    /// Wᵢ(x); zero for x < 0.
    pub fn steady_density(&self, x: f64, env: Env) -> f64 {
        let prob = self.env_prob(env);
        if x < 0.0 || prob == 0.0 {
            return 0.0;
        }
        prob * self.env_mixtures[env.index() - 1].eval(x)
    }

    /// W(x) = W₁(x) + W₂(x).
    pub fn marginal_density(&self, x: f64) -> f64 {
        Env::BOTH.iter().map(|&e| self.steady_density(x, e)).sum()
    }

    /// W as a single generalized exponential mixture.
    pub fn marginal_mixture(&self) -> GeneralizedMixture {
        let weight = Env::BOTH
            .iter()
            .map(|&e| self.env_prob(e) * self.env_mixtures[e.index() - 1].weight)
            .sum();
        let m = self.env_mixtures[0];
        GeneralizedMixture::exponential(weight, m.param1, m.param2)
    }

    /// E[X | E = env].
    pub fn conditional_mean(&self, env: Env) -> Result<f64> {
        if self.env_prob(env) == 0.0 {
            return Err(Error::Domain(format!("environment {env} carries no steady-state mass")));
        }
        Ok(self.env_mixtures[env.index() - 1].mean())
    }

    /// E(X).
    pub fn mean(&self) -> f64 {
        Env::BOTH
            .iter()
            .filter(|&&e| self.env_prob(e) > 0.0)
            .map(|&e| self.env_prob(e) * self.env_mixtures[e.index() - 1].mean())
            .sum()
    }

    /// Mᵢ(z) = E[e^{zX} 1{E = i}], finite for z below the smallest decay rate.
    pub fn mgf(&self, z: f64, env: Env) -> Result<f64> {
        let m = self.env_mixtures[env.index() - 1];
        let limit = m.param1.min(m.param2);
        if !(z < limit) {
            return Err(Error::Domain(format!("mgf needs z < {limit}, got {z}")));
        }
        if self.env_prob(env) == 0.0 {
            return Ok(0.0);
        }
        let Some(r) = self.roots else {
            return Ok(limit / (limit - z));
        };
        let o = env.other();
        let (wo, go) = (self.spec.variance(o), -self.spec.drift(o));
        let s = self.spec.drift_balance();
        let eta_sum = self.spec.eta1 + self.spec.eta2;
        let pre = 4.0 * self.spec.eta(o) * s
            / (self.spec.omega1_sq * self.spec.omega2_sq * r.xi3s * eta_sum)
            / (wo * r.xi3s - 2.0 * go);
        Ok(pre * (-wo * z - wo * r.xi3s + 2.0 * go) / ((z - r.xi1s) * (z - r.xi2s)))
    }
}
