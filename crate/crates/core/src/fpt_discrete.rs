//! First emptying time of the queue when η₂ = 0: taboo probabilities that
//! avoid level 0, the first-passage density, its Laplace transform, the
//! probability of ever emptying and the mean emptying time.

use crate::error::{Error, Result};
use crate::model::{Env, QueueSpec};
use crate::numerics::{power_difference_quotient, NumericSettings};
use crate::transient::{integrate_panels, panels, require_eta2_zero, BesselTable, MM1Kernel};
use serde::{Deserialize, Serialize};

/// Roots of the two quadratics that appear in the transform of the
/// first-passage density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceRootsDiscrete {
    pub phi1: f64,
    pub phi2: f64,
    pub psi1: f64,
    pub psi2: f64,
    pub s: f64,
}

// Roots of μz² − (λ + μ + a)z + λ with a ≥ 0. The discriminant is expanded so
// that a = 0, λ = μ gives exactly z = 1.
fn quadratic_roots(lambda: f64, mu: f64, a: f64) -> (f64, f64) {
    let disc = a * a + 2.0 * a * (lambda + mu) + (lambda - mu) * (lambda - mu);
    let big = (a + lambda + mu + disc.sqrt()) / (2.0 * mu);
    (big, lambda / (mu * big))
}

impl LaplaceRootsDiscrete {
    pub fn new(spec: &QueueSpec, s: f64) -> Result<Self> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("s must be finite and >= 0, got {s}")));
        }
        Ok(Self::unchecked(spec, s))
    }

    // Also valid slightly left of 0, which the derivative checks use.
    fn unchecked(spec: &QueueSpec, s: f64) -> Self {
        let (phi1, phi2) = quadratic_roots(spec.lambda1, spec.mu1, s + spec.eta1);
        let (psi1, psi2) = quadratic_roots(spec.lambda2, spec.mu2, s);
        Self {
            phi1,
            phi2,
            psi1,
            psi2,
            s,
        }
    }
}

/// P(N(t) = n, no visit to 0 in [0, t] | N(0) = j) for a plain M/M/1 queue.
pub fn avoiding_prob(kernel: &MM1Kernel, j: u64, n: u64, t: f64) -> Result<f64> {
    check(j, n, t)?;
    if t == 0.0 {
        return Ok(if j == n { 1.0 } else { 0.0 });
    }
    let (j, n) = (j as i64, n as i64);
    let mut table = BesselTable::new(kernel.arg(t), (n + j + 1) as usize)?;
    let base = kernel.ln_envelope(t) + 0.5 * (n - j) as f64 * kernel.ln_rho();
    Ok((base + table.ln(n - j)).exp() - (base + table.ln(n + j)).exp())
}

/// The `n = 1` taboo probability in closed form, `(j/(μt)) e^{-(λ+μ)t} (μ/λ)^{j/2} I_j`.
pub fn avoiding_prob_one(kernel: &MM1Kernel, j: u64, t: f64) -> Result<f64> {
    check(j, 1, t)?;
    if t == 0.0 {
        return Ok(if j == 1 { 1.0 } else { 0.0 });
    }
    Ok(mm1_fpt_density(kernel, j, t)? / kernel.mu)
}

/// First-passage density from `j` to 0 of a plain M/M/1 queue.
pub fn mm1_fpt_density(kernel: &MM1Kernel, j: u64, t: f64) -> Result<f64> {
    check(j, 1, t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let mut table = BesselTable::new(kernel.arg(t), j as usize)?;
    let ln = kernel.ln_envelope(t) - 0.5 * j as f64 * kernel.ln_rho() + table.ln(j as i64);
    Ok(j as f64 / t * ln.exp())
}

fn check(j: u64, n: u64, t: f64) -> Result<()> {
    if j == 0 || n == 0 {
        return Err(Error::Domain("taboo quantities need j >= 1 and n >= 1".into()));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

// Taboo probabilities α̂_{j,k}(t) for k = 1..=k_max; index 0 is unused.
fn avoiding_row(kernel: &MM1Kernel, j: u64, k_max: u64, t: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; k_max as usize + 1];
    if t == 0.0 {
        if j <= k_max {
            out[j as usize] = 1.0;
        }
        return Ok(out);
    }
    let mut table = BesselTable::new(kernel.arg(t), (j + k_max) as usize + 1)?;
    let (ln_e, ln_rho, j) = (kernel.ln_envelope(t), kernel.ln_rho(), j as i64);
    for k in 1..=k_max as i64 {
        let base = ln_e + 0.5 * (k - j) as f64 * ln_rho;
        out[k as usize] = (base + table.ln(k - j)).exp() - (base + table.ln(k + j)).exp();
    }
    Ok(out)
}

// α̂_{k,n}(t) for k = 1..=k_max at fixed n; index 0 is unused.
fn avoiding_column(kernel: &MM1Kernel, n: u64, k_max: u64, t: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; k_max as usize + 1];
    if t == 0.0 {
        if n <= k_max {
            out[n as usize] = 1.0;
        }
        return Ok(out);
    }
    let mut table = BesselTable::new(kernel.arg(t), (n + k_max) as usize + 1)?;
    let (ln_e, ln_rho, n) = (kernel.ln_envelope(t), kernel.ln_rho(), n as i64);
    for k in 1..=k_max as i64 {
        let base = ln_e + 0.5 * (n - k) as f64 * ln_rho;
        out[k as usize] = (base + table.ln(n - k)).exp() - (base + table.ln(n + k)).exp();
    }
    Ok(out)
}

// ĝ_{k,0}(t) for k = 1..=k_max; index 0 is unused.
fn fpt_column(kernel: &MM1Kernel, k_max: u64, t: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; k_max as usize + 1];
    if t == 0.0 {
        return Ok(out);
    }
    let mut table = BesselTable::new(kernel.arg(t), k_max as usize + 1)?;
    let (ln_e, ln_rho) = (kernel.ln_envelope(t), kernel.ln_rho());
    for k in 1..=k_max as i64 {
        out[k as usize] = k as f64 / t * (ln_e - 0.5 * k as f64 * ln_rho + table.ln(k)).exp();
    }
    Ok(out)
}

fn require_start(spec: &QueueSpec) -> Result<QueueSpec> {
    let spec = require_eta2_zero(spec)?;
    if spec.init_state == 0 {
        return Err(Error::Domain(
            "first emptying needs an initial level j >= 1".into(),
        ));
    }
    Ok(spec)
}

// ∫₀ᵗ e^{-η₁τ} Σ_k α̂¹_{j,k}(τ) v_k(t-τ) dτ for a column-valued `v`.
fn taboo_convolution<V>(spec: &QueueSpec, t: f64, settings: &NumericSettings, column: V) -> Result<f64>
where
    V: Fn(u64, f64) -> Result<Vec<f64>>,
{
    let j = spec.init_state;
    let k1 = MM1Kernel::of(spec, Env::One);
    let k_max = k1.reach(j, t);
    let mut failure = None;
    let integrand = |tau: f64| -> f64 {
        let eval = || -> Result<f64> {
            let row = avoiding_row(&k1, j, k_max, tau)?;
            let col = column(k_max, t - tau)?;
            let sum: f64 = row.iter().zip(&col).skip(1).map(|(a, b)| a * b).sum();
            Ok((-spec.eta1 * tau).exp() * sum)
        };
        eval().unwrap_or_else(|e| {
            failure.get_or_insert(e);
            0.0
        })
    };
    let value = integrate_panels(integrand, &panels(t), settings)?;
    failure.map_or(Ok(value), Err)
}

/// γ_{n,i}(t) = P(N(t) = n, E(t) = i, T_j > t) for `n >= 1`.
pub fn absorbed_state_prob(
    spec: &QueueSpec,
    n: u64,
    env: Env,
    t: f64,
    settings: &NumericSettings,
) -> Result<f64> {
    let spec = require_start(spec)?;
    check(spec.init_state, n, t)?;
    let (j, p) = (spec.init_state, spec.init_env_prob);
    let k1 = MM1Kernel::of(&spec, Env::One);
    let k2 = MM1Kernel::of(&spec, Env::Two);
    match env {
        Env::One => Ok(p * (-spec.eta1 * t).exp() * avoiding_prob(&k1, j, n, t)?),
        Env::Two => {
            let direct = (1.0 - p) * avoiding_prob(&k2, j, n, t)?;
            if p == 0.0 || spec.eta1 == 0.0 || t == 0.0 {
                return Ok(direct);
            }
            let conv = taboo_convolution(&spec, t, settings, |k_max, u| {
                avoiding_column(&k2, n, k_max, u)
            })?;
            Ok(direct + p * spec.eta1 * conv)
        }
    }
}

/// Density b_j(t) of the first emptying time.
pub fn fpt_density(spec: &QueueSpec, t: f64, settings: &NumericSettings) -> Result<f64> {
    let spec = require_start(spec)?;
    check(spec.init_state, 1, t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let (j, p) = (spec.init_state, spec.init_env_prob);
    let k1 = MM1Kernel::of(&spec, Env::One);
    let k2 = MM1Kernel::of(&spec, Env::Two);
    let mut total = (1.0 - p) * mm1_fpt_density(&k2, j, t)?;
    if p > 0.0 {
        total += p * (-spec.eta1 * t).exp() * mm1_fpt_density(&k1, j, t)?;
        if spec.eta1 > 0.0 {
            let conv = taboo_convolution(&spec, t, settings, |k_max, u| fpt_column(&k2, k_max, u))?;
            total += p * spec.eta1 * conv;
        }
    }
    Ok(total)
}

/// B_j(s) = ∫₀^∞ e^{-st} b_j(t) dt in closed form.
pub fn fpt_laplace(spec: &QueueSpec, s: f64) -> Result<f64> {
    let spec = require_start(spec)?;
    LaplaceRootsDiscrete::new(&spec, s)?;
    Ok(laplace_at(&spec, s))
}

fn laplace_at(spec: &QueueSpec, s: f64) -> f64 {
    let r = LaplaceRootsDiscrete::unchecked(spec, s);
    let (j, p) = (spec.init_state, spec.init_env_prob);
    let jf = j as f64;
    let mut value = p * r.phi1.powf(-jf) + (1.0 - p) * r.psi1.powf(-jf);
    if p > 0.0 && spec.eta1 > 0.0 {
        // (ψ₁ʲ − φ₁ʲ) / ((ψ₁ − φ₁) φ₁^{j−1} ψ₁^{j−1}) as a finite sum, which
        // has no singularity where the two roots meet.
        let ratio = power_difference_quotient(1.0 / r.phi1, 1.0 / r.psi1, j as u32);
        value += spec.eta1 * p * r.phi2 / (spec.lambda1 * (r.psi1 - r.phi2)) * ratio;
    }
    value
}

/// P(T_j < ∞).
pub fn absorption_probability(spec: &QueueSpec) -> Result<f64> {
    let spec = require_start(spec)?;
    if spec.lambda2 <= spec.mu2 {
        return Ok(1.0);
    }
    fpt_laplace(&spec, 0.0)
}

/// E(T_j), defined when λ₂ < μ₂ and η₁ > 0 (or p = 0).
pub fn fpt_mean(spec: &QueueSpec) -> Result<f64> {
    let spec = require_start(spec)?;
    if spec.lambda2 >= spec.mu2 {
        return Err(Error::UndefinedMean("FPT mean undefined: λ₂ ≥ μ₂".into()));
    }
    let j = spec.init_state as f64;
    let p = spec.init_env_prob;
    let base = j / (spec.mu2 - spec.lambda2);
    if p == 0.0 {
        return Ok(base);
    }
    if spec.eta1 == 0.0 {
        return Err(Error::UndefinedMean(
            "FPT mean undefined: η₁ = 0 with p > 0".into(),
        ));
    }
    let r = LaplaceRootsDiscrete::new(&spec, 0.0)?;
    let (l1, m1, e1) = (spec.lambda1, spec.mu1, spec.eta1);
    let a = l1 - m1 + e1;
    let b = l1 - m1 - e1;
    let bracket = 1.0 / (a * r.phi1 - b) + 1.0 / (a * r.phi2 - b)
        - (m1 - l1) / (e1 * (spec.mu2 - spec.lambda2));
    Ok(base + p * (1.0 - r.phi1.powf(-j)) * bracket)
}
