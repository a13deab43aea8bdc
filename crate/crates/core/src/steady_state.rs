//! Steady-state distribution of the switching M/M/1 queue: joint and marginal
//! probabilities, means, entropies and generating functions.

use crate::error::{Error, Result};
use crate::model::{Env, QueueSpec, StabilityCase};
use crate::numerics::{eval_cubic, solve_cubic, SeriesSettings};
use serde::{Deserialize, Serialize};

/// Roots of the characteristic cubic with ξ₁ > ξ₂ > 1 > ξ₃ > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicRootsDiscrete {
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixtureFamily {
    /// Components `(1-r) r^n` on `n = 0, 1, ...`, parameters are the ratios `r`.
    Geometric,
    /// Components `c e^{-c x}` on `x >= 0`, parameters are the rates `c`.
    Exponential,
}

/// `A·F₁ + (1−A)·F₂` where `A` may lie outside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedMixture {
    pub family: MixtureFamily,
    pub weight: f64,
    pub param1: f64,
    pub param2: f64,
}

impl GeneralizedMixture {
    pub fn geometric(weight: f64, ratio1: f64, ratio2: f64) -> Self {
        Self {
            family: MixtureFamily::Geometric,
            weight,
            param1: ratio1,
            param2: ratio2,
        }
    }

    pub fn exponential(weight: f64, rate1: f64, rate2: f64) -> Self {
        Self {
            family: MixtureFamily::Exponential,
            weight,
            param1: rate1,
            param2: rate2,
        }
    }

    fn component(&self, param: f64, at: f64) -> f64 {
        match self.family {
            MixtureFamily::Geometric => (1.0 - param) * param.powf(at),
            MixtureFamily::Exponential => param * (-param * at).exp(),
        }
    }

    /// Probability mass at `n` (geometric) or density at `x` (exponential).
    pub fn eval(&self, at: f64) -> f64 {
        self.weight * self.component(self.param1, at)
            + (1.0 - self.weight) * self.component(self.param2, at)
    }

    pub fn mean(&self) -> f64 {
        let m = |c: f64| match self.family {
            MixtureFamily::Geometric => c / (1.0 - c),
            MixtureFamily::Exponential => 1.0 / c,
        };
        self.weight * m(self.param1) + (1.0 - self.weight) * m(self.param2)
    }

    /// Checks nonnegativity and unit mass over the truncated support
    /// `0..=support` (geometric) or a grid on `[0, support]` (exponential).
    pub fn check(&self, support: usize) -> bool {
        match self.family {
            MixtureFamily::Geometric => {
                let mut total = 0.0;
                for n in 0..=support {
                    let v = self.eval(n as f64);
                    if v < -1e-15 {
                        return false;
                    }
                    total += v;
                }
                let tail = self.param1.max(self.param2).powf(support as f64 + 1.0);
                (total - 1.0).abs() <= 1e-9 + tail
            }
            MixtureFamily::Exponential => (0..=support * 10)
                .map(|k| self.eval(k as f64 * 0.1))
                .all(|v| v >= -1e-15),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateSolution {
    pub case: StabilityCase,
    pub roots: Option<CubicRootsDiscrete>,
    /// Conditional law of N given E = i, for i = 1, 2.
    pub env_mixtures: [GeneralizedMixture; 2],
    /// P(E = i).
    pub env_probs: [f64; 2],
    /// (q₀,₁, q₀,₂).
    pub q0: [f64; 2],
    pub spec: QueueSpec,
    pub series: SeriesSettings,
}

/// Coefficients `[c3, c2, c1, c0]` of P(z).
pub fn characteristic_cubic(s: &QueueSpec) -> [f64; 4] {
    let (l1, m1, l2, m2, e1, e2) = (s.lambda1, s.mu1, s.lambda2, s.mu2, s.eta1, s.eta2);
    [
        l1 * l2,
        -(l1 * l2 + l1 * m2 + l1 * e2 + m1 * l2 + e1 * l2),
        l1 * m2 + m1 * l2 + m1 * m2 + m1 * e2 + e1 * m2,
        -m1 * m2,
    ]
}

/// Roots of P(z) classified as ξ₁ > ξ₂ > 1 > ξ₃ > 0.
pub fn discrete_roots(spec: &QueueSpec) -> Result<CubicRootsDiscrete> {
    let c = characteristic_cubic(spec);
    let r = solve_cubic(c[0], c[1], c[2], c[3])?.0;
    let below: Vec<f64> = r.iter().copied().filter(|&z| z > 0.0 && z < 1.0).collect();
    let above: Vec<f64> = r.iter().copied().filter(|&z| z > 1.0).collect();
    if below.len() != 1 || above.len() != 2 {
        return Err(Error::RootClassification(format!(
            "expected two roots above 1 and one in (0, 1), got {r:?}"
        )));
    }
    let roots = CubicRootsDiscrete {
        xi1: above[0].max(above[1]),
        xi2: above[0].min(above[1]),
        xi3: below[0],
    };
    let gap = roots.xi1 - roots.xi2;
    if gap < 1e-8 {
        return Err(Error::ConfluentRoots { gap });
    }
    Ok(roots)
}

/// Residual of P at `z`, scaled by the largest coefficient.
pub fn scaled_residual(spec: &QueueSpec, z: f64) -> f64 {
    let c = characteristic_cubic(spec);
    let cmax = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    eval_cubic(c, z).abs() / (cmax * z.abs().max(1.0).powi(3))
}

pub fn solve_steady(spec: &QueueSpec) -> Result<SteadyStateSolution> {
    solve_steady_with(spec, &SeriesSettings::default())
}

pub fn solve_steady_with(spec: &QueueSpec, series: &SeriesSettings) -> Result<SteadyStateSolution> {
    let spec = spec.validate()?;
    series.validate()?;
    let case = spec.classify();
    match case {
        StabilityCase::NoSteadyState => Err(Error::NoSteadyState(format!(
            "η₁(μ₂−λ₂)+η₂(μ₁−λ₁) = {} with η₁ = {}, η₂ = {}",
            spec.drift_balance(),
            spec.eta1,
            spec.eta2
        ))),
        StabilityCase::CaseI | StabilityCase::CaseII => {
            let live = if case == StabilityCase::CaseI { Env::Two } else { Env::One };
            let rho = spec.lambda(live) / spec.mu(live);
            let geo = GeneralizedMixture::geometric(1.0, rho, rho);
            let mut env_probs = [0.0; 2];
            let mut q0 = [0.0; 2];
            env_probs[live.index() - 1] = 1.0;
            q0[live.index() - 1] = 1.0 - rho;
            Ok(SteadyStateSolution {
                case,
                roots: None,
                env_mixtures: [geo, geo],
                env_probs,
                q0,
                spec,
                series: *series,
            })
        }
        StabilityCase::CaseIII => {
            let roots = discrete_roots(&spec)?;
            let CubicRootsDiscrete { xi1, xi2, xi3 } = roots;
            let (l, m) = ([spec.lambda1, spec.lambda2], [spec.mu1, spec.mu2]);
            let eta = [spec.eta1, spec.eta2];
            let s = spec.drift_balance();
            let eta_sum = eta[0] + eta[1];
            let mut mixtures = [GeneralizedMixture::geometric(0.0, 0.0, 0.0); 2];
            let mut q0 = [0.0; 2];
            let mut env_probs = [0.0; 2];
            for i in 0..2 {
                let o = 1 - i;
                let a = xi1 * xi3 * s / (l[i] * m[i] * (1.0 - xi3) * (xi1 - 1.0) * (xi1 - xi2))
                    * (m[i] - l[i] * xi2)
                    / (m[o] - l[o] * xi3);
                mixtures[i] = GeneralizedMixture::geometric(a, 1.0 / xi1, 1.0 / xi2);
                q0[i] = eta[o] * xi3 * s / (m[i] * (1.0 - xi3) * (m[o] - l[o] * xi3) * eta_sum);
                env_probs[i] = eta[o] / eta_sum;
            }
            Ok(SteadyStateSolution {
                case,
                roots: Some(roots),
                env_mixtures: mixtures,
                env_probs,
                q0,
                spec,
                series: *series,
            })
        }
    }
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

impl SteadyStateSolution {
    fn mixture(&self, env: Env) -> &GeneralizedMixture {
        &self.env_mixtures[env.index() - 1]
    }

    pub fn env_prob(&self, env: Env) -> f64 {
        self.env_probs[env.index() - 1]
    }

    /// q_{n,i}.
    pub fn joint_pmf(&self, n: u64, env: Env) -> f64 {
        self.env_prob(env) * self.mixture(env).eval(n as f64)
    }

    /// Like [`joint_pmf`](Self::joint_pmf) with a numeric environment index.
    pub fn joint_pmf_index(&self, n: u64, i: usize) -> Result<f64> {
        Ok(self.joint_pmf(n, Env::try_from(i)?))
    }

    /// q_n = q_{n,1} + q_{n,2}.
    pub fn marginal_pmf(&self, n: u64) -> f64 {
        self.joint_pmf(n, Env::One) + self.joint_pmf(n, Env::Two)
    }

    /// Law of N as a single generalized mixture.
    pub fn marginal_mixture(&self) -> GeneralizedMixture {
        let [m1, m2] = self.env_mixtures;
        let [p1, p2] = self.env_probs;
        GeneralizedMixture::geometric(p1 * m1.weight + p2 * m2.weight, m1.param1, m1.param2)
    }

    /// E[N | E = i].
    pub fn conditional_mean(&self, env: Env) -> Result<f64> {
        if self.env_prob(env) == 0.0 {
            return Err(Error::Domain(format!(
                "environment {env} carries no steady-state mass"
            )));
        }
        Ok(self.mixture(env).mean())
    }

    pub fn mean(&self) -> f64 {
        Env::BOTH
            .iter()
            .filter(|&&e| self.env_prob(e) > 0.0)
            .map(|&e| self.env_prob(e) * self.mixture(e).mean())
            .sum()
    }

    // Sums f(n) until q_{n,1} and q_{n,2} are both below tail_tol with n > 10.
    fn sum_until_negligible<F: FnMut(u64) -> f64>(&self, mut f: F) -> Result<f64> {
        let tol = self.series.tail_tol;
        let mut total = 0.0;
        for n in 0..self.series.max_terms as u64 {
            total += f(n);
            if n > 10 && self.joint_pmf(n, Env::One) < tol && self.joint_pmf(n, Env::Two) < tol {
                return Ok(total);
            }
        }
        Err(Error::SeriesNonConvergence {
            terms: self.series.max_terms,
            partial: total,
        })
    }

    /// H[N | E = i] in nats.
    pub fn entropy_n_given_env(&self, env: Env) -> Result<f64> {
        if self.env_prob(env) == 0.0 {
            return Err(Error::Domain(format!(
                "environment {env} carries no steady-state mass"
            )));
        }
        let mix = *self.mixture(env);
        self.sum_until_negligible(|n| -plogp(mix.eval(n as f64)))
    }

    /// H(N) in nats.
    pub fn entropy_n(&self) -> Result<f64> {
        self.sum_until_negligible(|n| -plogp(self.marginal_pmf(n)))
    }

    /// H[E | N = n].
    pub fn entropy_env_given_n(&self, n: u64) -> f64 {
        let q = self.marginal_pmf(n);
        if q <= 0.0 {
            return 0.0;
        }
        -Env::BOTH
            .iter()
            .map(|&e| plogp(self.joint_pmf(n, e) / q))
            .sum::<f64>()
    }

    /// H(E).
    pub fn entropy_env(&self) -> f64 {
        -self.env_probs.iter().map(|&p| plogp(p)).sum::<f64>()
    }

    /// lim_{n→∞} H[E | N = n]. The slower component 1/ξ₂ dominates both
    /// environments, so the limiting split is proportional to η_{3−i}(1 − Aᵢ).
    pub fn entropy_env_limit(&self) -> f64 {
        if self.case != StabilityCase::CaseIII {
            return 0.0;
        }
        let w: Vec<f64> = (0..2)
            .map(|i| self.env_probs[i] * (1.0 - self.env_mixtures[i].weight))
            .collect();
        let total = w[0] + w[1];
        -w.iter().map(|&v| plogp(v / total)).sum::<f64>()
    }

    /// Gᵢ(z) = Σ_n zⁿ q_{n,i}, from its rational closed form.
    pub fn pgf(&self, z: f64, env: Env) -> Result<f64> {
        if !(z > 0.0 && z < 1.0) && z != 1.0 {
            return Err(Error::Domain(format!("pgf argument must lie in (0, 1], got {z}")));
        }
        let s = &self.spec;
        match self.roots {
            None => {
                let p = self.env_prob(env);
                let r = self.mixture(env).param1;
                Ok(p * (1.0 - r) / (1.0 - r * z))
            }
            Some(CubicRootsDiscrete { xi1, xi2, xi3 }) => {
                let o = env.other();
                let (lo, mo) = (s.lambda(o), s.mu(o));
                let lead = s.eta(o) * s.drift_balance()
                    / ((1.0 - xi3) * (mo - lo * xi3) * (s.eta1 + s.eta2));
                Ok(lead * (mo - lo * xi3 * z)
                    / (s.lambda1 * s.lambda2 * (z - xi1) * (z - xi2)))
            }
        }
    }
}
