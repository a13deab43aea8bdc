//! Transient joint distribution when environment 2 is absorbing (η₂ = 0),
//! assembled from the transition probabilities of two plain M/M/1 queues.

use crate::error::{Error, Result};
use crate::model::{Env, QueueSpec};
use crate::numerics::{bessel_i_scaled_seq, integrate, sum_series, NumericSettings, SeriesSettings};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A single M/M/1 queue with arrival rate `lambda` and service rate `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MM1Kernel {
    pub lambda: f64,
    pub mu: f64,
}

/// `ln(e^{-x} I_k(x))` for `k = 0..len`, grown on demand.
#[derive(Debug, Clone)]
pub(crate) struct BesselTable {
    x: f64,
    ln_i: Vec<f64>,
}

impl BesselTable {
    pub(crate) fn new(x: f64, order: usize) -> Result<Self> {
        let mut t = Self { x, ln_i: Vec::new() };
        t.fill(order.max(16))?;
        Ok(t)
    }

    fn fill(&mut self, order: usize) -> Result<()> {
        self.ln_i = bessel_i_scaled_seq(order, self.x)?
            .into_iter()
            .map(|v| if v > 0.0 { v.ln() } else { f64::NEG_INFINITY })
            .collect();
        Ok(())
    }

    /// `ln(e^{-x} I_|k|(x))`.
    pub(crate) fn ln(&mut self, k: i64) -> f64 {
        let k = k.unsigned_abs() as usize;
        if k >= self.ln_i.len() {
            // Growing only fails on invalid x, which `new` already rejected.
            let _ = self.fill((2 * k).max(self.ln_i.len() * 2));
        }
        self.ln_i[k]
    }

    pub(crate) fn len(&self) -> usize {
        self.ln_i.len()
    }
}

impl MM1Kernel {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda > 0.0 && mu > 0.0 && lambda.is_finite() && mu.is_finite()) {
            return Err(Error::Domain(format!(
                "M/M/1 rates must be positive, got λ = {lambda}, μ = {mu}"
            )));
        }
        Ok(Self { lambda, mu })
    }

    pub fn of(spec: &QueueSpec, env: Env) -> Self {
        Self {
            lambda: spec.lambda(env),
            mu: spec.mu(env),
        }
    }

    /// Bessel argument 2t√(λμ).
    pub(crate) fn arg(&self, t: f64) -> f64 {
        2.0 * t * (self.lambda * self.mu).sqrt()
    }

    /// `ln e^{-(√λ-√μ)²t}`, the factor left over once `e^{-(λ+μ)t}` is split
    /// into `e^{-x}` for the scaled Bessel functions.
    pub(crate) fn ln_envelope(&self, t: f64) -> f64 {
        let d = self.lambda.sqrt() - self.mu.sqrt();
        -d * d * t
    }

    pub(crate) fn ln_rho(&self) -> f64 {
        (self.lambda / self.mu).ln()
    }

    /// Transition probability from `j` to `n` in time `t`.
    ///
    /// For `j = 0` the single-series representation is used; otherwise the
    /// three-term Bessel form with its tail summed by [`sum_series`].
    pub fn transition(&self, j: u64, n: u64, t: f64, series: &SeriesSettings) -> Result<f64> {
        check_time(t)?;
        if t == 0.0 {
            return Ok(if j == n { 1.0 } else { 0.0 });
        }
        if j == 0 {
            return self.transition_from_empty(n, t, series);
        }
        self.transition_three_term(j, n, t, series)
    }

    /// The three-term form, valid for every `j` including 0.
    pub fn transition_three_term(
        &self,
        j: u64,
        n: u64,
        t: f64,
        series: &SeriesSettings,
    ) -> Result<f64> {
        check_time(t)?;
        if t == 0.0 {
            return Ok(if j == n { 1.0 } else { 0.0 });
        }
        let (j, n) = (j as i64, n as i64);
        let ln_e = self.ln_envelope(t);
        let ln_rho = self.ln_rho();
        let rho = self.lambda / self.mu;
        let mut table = BesselTable::new(self.arg(t), (n + j + 64) as usize)?;
        let first = (ln_e + 0.5 * (n - j) as f64 * ln_rho + table.ln(n - j)).exp();
        let second = (ln_e + 0.5 * (n - j - 1) as f64 * ln_rho + table.ln(n + j + 1)).exp();
        let tail = sum_series(
            |k| (ln_e + (n as f64 - 0.5 * k as f64) * ln_rho + table.ln(k)).exp(),
            n + j + 2,
            series,
        )?;
        Ok(first + second + (1.0 - rho) * tail)
    }

    /// `(1/(μt)) ρⁿ e^{-(λ+μ)t} Σ_{k≥n+1} k (μ/λ)^{k/2} I_k(2t√(λμ))`.
    pub fn transition_from_empty(&self, n: u64, t: f64, series: &SeriesSettings) -> Result<f64> {
        check_time(t)?;
        if t == 0.0 {
            return Ok(if n == 0 { 1.0 } else { 0.0 });
        }
        let n = n as i64;
        let ln_e = self.ln_envelope(t);
        let ln_rho = self.ln_rho();
        let mut table = BesselTable::new(self.arg(t), (n + 64) as usize)?;
        let sum = sum_series(
            |k| k as f64 * (ln_e + (n as f64 - 0.5 * k as f64) * ln_rho + table.ln(k)).exp(),
            n + 1,
            series,
        )?;
        Ok(sum / (self.mu * t))
    }

    /// Order up to which Bessel terms matter for states `<= need` at time
    /// `t`, including the `ρ^{-k/2}`-weighted tail sums.
    fn bessel_extent(&self, need: usize, t: f64) -> usize {
        let x = self.arg(t);
        let peak = if self.lambda < self.mu {
            0.5 * x * self.ln_rho().abs()
        } else {
            0.0
        };
        need + 2 + (peak + 12.0 * x.sqrt() + 40.0).ceil() as usize
    }

    /// Shared Bessel data for many transition probabilities at the same `t`.
    pub(crate) fn prepare(&self, need: usize, t: f64) -> Result<Prepared> {
        let ln_e = self.ln_envelope(t);
        let ln_rho = self.ln_rho();
        let mut extent = self.bessel_extent(need, t);
        loop {
            let table = BesselTable::new(self.arg(t), extent)?;
            let len = table.len();
            let weights: Vec<f64> = (0..len)
                .map(|k| (ln_e - 0.5 * k as f64 * ln_rho + table.ln_i[k]).exp())
                .collect();
            let peak = weights.iter().fold(0.0f64, |m, &w| m.max(w));
            if weights[len - 1] > 1e-18 * peak && weights[len - 1] > 1e-300 {
                extent *= 2;
                continue;
            }
            let mut suffix = vec![0.0; len + 1];
            for k in (0..len).rev() {
                suffix[k] = suffix[k + 1] + weights[k];
            }
            let ln_suffix = suffix
                .into_iter()
                .map(|v| if v > 0.0 { v.ln() } else { f64::NEG_INFINITY })
                .collect();
            return Ok(Prepared {
                ln_e,
                ln_rho,
                rho: self.lambda / self.mu,
                ln_i: table.ln_i,
                ln_suffix,
            });
        }
    }

    /// `p̂_{j,n}(t)` for `n = 0..=n_max`.
    pub fn transition_row(&self, j: u64, n_max: u64, t: f64) -> Result<Vec<f64>> {
        check_time(t)?;
        if t == 0.0 {
            return Ok((0..=n_max).map(|n| if n == j { 1.0 } else { 0.0 }).collect());
        }
        let p = self.prepare((j + n_max) as usize + 1, t)?;
        Ok((0..=n_max).map(|n| p.transition(j as i64, n as i64)).collect())
    }

    /// `p̂_{j,n}(t)` for `j = 0..=j_max` at fixed `n`.
    pub fn transition_column(&self, n: u64, j_max: u64, t: f64) -> Result<Vec<f64>> {
        check_time(t)?;
        if t == 0.0 {
            return Ok((0..=j_max).map(|j| if n == j { 1.0 } else { 0.0 }).collect());
        }
        let p = self.prepare((n + j_max) as usize + 1, t)?;
        Ok((0..=j_max).map(|j| p.transition(j as i64, n as i64)).collect())
    }

    /// Index beyond which the row from `j` at time `t` carries negligible mass.
    pub(crate) fn reach(&self, j: u64, t: f64) -> u64 {
        let drift = (self.lambda - self.mu).max(0.0) * t;
        let spread = 12.0 * ((self.lambda + self.mu) * t).sqrt();
        j + (drift + spread).ceil() as u64 + 30
    }
}

/// Bessel data for one kernel at one time.
#[derive(Debug, Clone)]
pub(crate) struct Prepared {
    pub(crate) ln_e: f64,
    pub(crate) ln_rho: f64,
    rho: f64,
    pub(crate) ln_i: Vec<f64>,
    ln_suffix: Vec<f64>,
}

impl Prepared {
    pub(crate) fn ln_i(&self, k: i64) -> f64 {
        self.ln_i
            .get(k.unsigned_abs() as usize)
            .copied()
            .unwrap_or(f64::NEG_INFINITY)
    }

    fn ln_suffix(&self, m: i64) -> f64 {
        self.ln_suffix
            .get(m as usize)
            .copied()
            .unwrap_or(f64::NEG_INFINITY)
    }

    pub(crate) fn transition(&self, j: i64, n: i64) -> f64 {
        let first = (self.ln_e + 0.5 * (n - j) as f64 * self.ln_rho + self.ln_i(n - j)).exp();
        let second =
            (self.ln_e + 0.5 * (n - j - 1) as f64 * self.ln_rho + self.ln_i(n + j + 1)).exp();
        let tail = (n as f64 * self.ln_rho + self.ln_suffix(n + j + 2)).exp();
        first + second + (1.0 - self.rho) * tail
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be finite and >= 0, got {t}")))
    }
}

/// `p̂_{j,n}(t)` with default series settings.
pub fn mm1_transition(kernel: &MM1Kernel, j: u64, n: u64, t: f64) -> Result<f64> {
    kernel.transition(j, n, t, &SeriesSettings::default())
}

pub(crate) fn require_eta2_zero(spec: &QueueSpec) -> Result<QueueSpec> {
    let spec = spec.validate()?;
    if spec.eta2 != 0.0 {
        return Err(Error::UnsupportedRegime(format!(
            "transient formulas need η₂ = 0, got η₂ = {}; swap environments when η₁ = 0",
            spec.eta2
        )));
    }
    Ok(spec)
}

/// Number of τ-panels used for the convolution integrals. Splitting the range
/// up front lets the adaptive rule see the peaked shape of the integrand
/// near both ends.
pub(crate) fn panels(t: f64) -> Vec<f64> {
    let pieces = 8;
    (0..=pieces).map(|i| t * i as f64 / pieces as f64).collect()
}

/// P(N(t) = n, E(t) = env) for a queue started at `init_state` with
/// P(E(0) = 1) = `init_env_prob`, when η₂ = 0.
pub fn joint_transient(
    spec: &QueueSpec,
    n: u64,
    env: Env,
    t: f64,
    settings: &NumericSettings,
) -> Result<f64> {
    let spec = require_eta2_zero(spec)?;
    check_time(t)?;
    let j = spec.init_state;
    let p = spec.init_env_prob;
    let k1 = MM1Kernel::of(&spec, Env::One);
    let k2 = MM1Kernel::of(&spec, Env::Two);
    match env {
        Env::One => {
            if p == 0.0 {
                return Ok(0.0);
            }
            Ok(p * (-spec.eta1 * t).exp() * k1.transition(j, n, t, &settings.series)?)
        }
        Env::Two => {
            let direct = if p < 1.0 {
                (1.0 - p) * k2.transition(j, n, t, &settings.series)?
            } else {
                0.0
            };
            if p == 0.0 || spec.eta1 == 0.0 || t == 0.0 {
                return Ok(direct);
            }
            let conv = switch_convolution(&spec, n, t, settings)?;
            Ok(direct + p * spec.eta1 * conv)
        }
    }
}

/// `∫₀ᵗ e^{-η₁τ} Σ_k p̂¹_{j,k}(τ) p̂²_{k,n}(t-τ) dτ`.
fn switch_convolution(spec: &QueueSpec, n: u64, t: f64, settings: &NumericSettings) -> Result<f64> {
    let j = spec.init_state;
    let k1 = MM1Kernel::of(spec, Env::One);
    let k2 = MM1Kernel::of(spec, Env::Two);
    let k_max = k1.reach(j, t);
    let mut failure = None;
    let integrand = |tau: f64| -> f64 {
        let eval = || -> Result<f64> {
            let row = k1.transition_row(j, k_max, tau)?;
            let col = k2.transition_column(n, k_max, t - tau)?;
            Ok((-spec.eta1 * tau).exp() * row.iter().zip(&col).map(|(a, b)| a * b).sum::<f64>())
        };
        match eval() {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let value = integrate_panels(integrand, &panels(t), settings)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

pub(crate) fn integrate_panels<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    settings: &NumericSettings,
) -> Result<f64> {
    let mut total = 0.0;
    let q = settings.quadrature.scaled(1.0 / (points.len() as f64));
    for w in points.windows(2) {
        total += integrate(&mut f, w[0], w[1], &q)?;
    }
    Ok(total)
}

/// Swaps environment labels so that an η₁ = 0 queue can use
/// [`joint_transient`]; `env` refers to the original labelling.
pub fn joint_transient_relabeled(
    spec: &QueueSpec,
    n: u64,
    env: Env,
    t: f64,
    settings: &NumericSettings,
) -> Result<f64> {
    if spec.eta2 == 0.0 {
        joint_transient(spec, n, env, t, settings)
    } else if spec.eta1 == 0.0 {
        joint_transient(&spec.swap_environments(), n, env.other(), t, settings)
    } else {
        Err(Error::UnsupportedRegime(
            "transient formulas need one switching rate to be zero".into(),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransientPoint {
    pub t: f64,
    pub n: u64,
    pub p1: f64,
    pub p2: f64,
}

/// Evaluates both environments over every `(t, n)` pair. Points are computed
/// independently, so the result does not depend on how work is scheduled.
pub fn joint_transient_grid(
    spec: &QueueSpec,
    ns: &[u64],
    ts: &[f64],
    settings: &NumericSettings,
) -> Result<Vec<TransientPoint>> {
    let pairs: Vec<(f64, u64)> = ts.iter().flat_map(|&t| ns.iter().map(move |&n| (t, n))).collect();
    pairs
        .par_iter()
        .map(|&(t, n)| {
            Ok(TransientPoint {
                t,
                n,
                p1: joint_transient(spec, n, Env::One, t, settings)?,
                p2: joint_transient(spec, n, Env::Two, t, settings)?,
            })
        })
        .collect()
}
