//! Transient and first-passage quantities of the alternating diffusion when
//! only switches from environment 1 to environment 2 occur (η₂ = 0).

use super::wiener::WienerKernel;
use crate::error::{Error, Result};
use crate::model::{DiffusionSpec, Env};
use crate::numerics::{integrate_pieces, NumericSettings};
use crate::transient::{integrate_panels, panels};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Roots ζ₁,₂(s) of (ω₁²/2)ζ² − β₁ζ − (s + η₁) and θ₁,₂(s) of
/// (ω₂²/2)θ² − β₂θ − s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceRootsDiffusion {
    pub zeta1: f64,
    pub zeta2: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub s: f64,
}

impl LaplaceRootsDiffusion {
    pub fn new(spec: &DiffusionSpec, s: f64) -> Result<Self> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("Laplace argument must be >= 0, got {s}")));
        }
        Self::unchecked(spec, s)
    }

    fn unchecked(spec: &DiffusionSpec, s: f64) -> Result<Self> {
        let (b1, w1) = (spec.drift(Env::One), spec.omega1_sq);
        let (b2, w2) = (spec.drift(Env::Two), spec.omega2_sq);
        let d1 = b1 * b1 + 2.0 * w1 * (s + spec.eta1);
        let d2 = b2 * b2 + 2.0 * w2 * s;
        if d1 < 0.0 || d2 < 0.0 {
            return Err(Error::Domain(format!("Laplace argument {s} outside the region of real roots")));
        }
        let (r1, r2) = (d1.sqrt(), d2.sqrt());
        // The exact zero of θ₁(0) for β₂ ≤ 0 matters for P(T < ∞) = 1.
        let theta1 = if s == 0.0 { (b2 + b2.abs()) / w2 } else { (b2 + r2) / w2 };
        Ok(Self {
            zeta1: (b1 + r1) / w1,
            zeta2: (b1 - r1) / w1,
            theta1,
            theta2: (b2 - r2) / w2,
            s,
        })
    }
}

fn require_eta2_zero(spec: &DiffusionSpec) -> Result<DiffusionSpec> {
    let spec = spec.validate()?;
    if spec.eta2 != 0.0 {
        return Err(Error::UnsupportedRegime(format!(
            "switching-diffusion transient formulas need η₂ = 0, got η₂ = {}",
            spec.eta2
        )));
    }
    Ok(spec)
}

fn require_positive_start(spec: &DiffusionSpec) -> Result<()> {
    if !(spec.init_position > 0.0) {
        return Err(Error::Domain(format!(
            "first passage through 0 needs y > 0, got y = {}",
            spec.init_position
        )));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite and > 0, got {t}")));
    }
    Ok(())
}

fn check_position(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("position must be finite and >= 0, got {x}")));
    }
    Ok(())
}

/// η₁ ∫₀ᵗ dτ ∫₀^∞ dz e^{−η₁τ} a(z, τ) b(z, t − τ), where `a` is a density in z
/// started from y in environment 1 and `b(z, u)` is peaked near `target` − β₂u.
fn switch_convolution<A, B>(
    spec: &DiffusionSpec,
    t: f64,
    target: f64,
    settings: &NumericSettings,
    a: A,
    b: B,
) -> Result<f64>
where
    A: Fn(f64, f64) -> f64,
    B: Fn(f64, f64) -> f64,
{
    let (b1, s1) = (spec.drift(Env::One), spec.omega1_sq.sqrt());
    let (b2, s2) = (spec.drift(Env::Two), spec.omega2_sq.sqrt());
    let y = spec.init_position;
    let inner = settings.quadrature.scaled(0.1);
    let mut failure = None;
    let outer = |tau: f64| {
        let u = t - tau;
        let (w1, w2) = (s1 * tau.sqrt(), s2 * u.sqrt());
        let (c1, c2) = (y + b1 * tau, target - b2 * u);
        let upper = (y + b1.abs() * tau + 12.0 * w1).min(target + b2.abs() * u + 12.0 * w2);
        if !(upper > 0.0) {
            return 0.0;
        }
        let mut pts = vec![0.0, upper];
        for (c, w) in [(c1, w1), (c2, w2)] {
            for k in [-8.0, -3.0, 0.0, 3.0, 8.0] {
                let z = c + k * w;
                if z > 0.0 && z < upper {
                    pts.push(z);
                }
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let weight = (-spec.eta1 * tau).exp();
        match integrate_pieces(|z| a(z, tau) * b(z, u), &pts, &inner) {
            Ok(v) => weight * v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let mut outer = outer;
    let value = integrate_panels(&mut outer, &panels(t), settings)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(spec.eta1 * value),
    }
}

/// fᵢ(x, t): density of X(t) = x jointly with E(t) = env, for η₂ = 0.
pub fn transient_density(
    spec: &DiffusionSpec,
    x: f64,
    env: Env,
    t: f64,
    settings: &NumericSettings,
) -> Result<f64> {
    let spec = require_eta2_zero(spec)?;
    check_time(t)?;
    check_position(x)?;
    let (k1, k2) = (WienerKernel::of(&spec, Env::One), WienerKernel::of(&spec, Env::Two));
    let (y, p) = (spec.init_position, spec.init_env_prob);
    match env {
        Env::One => Ok(p * (-spec.eta1 * t).exp() * k1.reflected_density(x, t, y)),
        Env::Two => {
            let direct = (1.0 - p) * k2.reflected_density(x, t, y);
            if p == 0.0 {
                return Ok(direct);
            }
            let conv = switch_convolution(
                &spec,
                t,
                x,
                settings,
                |z, tau| k1.reflected_density(z, tau, y),
                |z, u| k2.reflected_density(x, u, z),
            )?;
            Ok(direct + p * conv)
        }
    }
}

/// hᵢ(x, t | y): density of the process killed at 0, jointly with E(t) = env.
pub fn absorbed_transient_density(
    spec: &DiffusionSpec,
    x: f64,
    env: Env,
    t: f64,
    settings: &NumericSettings,
) -> Result<f64> {
    let spec = require_eta2_zero(spec)?;
    require_positive_start(&spec)?;
    check_time(t)?;
    check_position(x)?;
    let (k1, k2) = (WienerKernel::of(&spec, Env::One), WienerKernel::of(&spec, Env::Two));
    let (y, p) = (spec.init_position, spec.init_env_prob);
    match env {
        Env::One => Ok(p * (-spec.eta1 * t).exp() * k1.absorbed_density(x, t, y)),
        Env::Two => {
            let direct = (1.0 - p) * k2.absorbed_density(x, t, y);
            if p == 0.0 || x == 0.0 {
                return Ok(direct);
            }
            let conv = switch_convolution(
                &spec,
                t,
                x,
                settings,
                |z, tau| k1.absorbed_density(z, tau, y),
                |z, u| k2.absorbed_density(x, u, z),
            )?;
            Ok(direct + p * conv)
        }
    }
}

/// k(0, t | y): density of the first passage through 0.
pub fn fpt_density(spec: &DiffusionSpec, t: f64, settings: &NumericSettings) -> Result<f64> {
    let spec = require_eta2_zero(spec)?;
    require_positive_start(&spec)?;
    check_time(t)?;
    let (k1, k2) = (WienerKernel::of(&spec, Env::One), WienerKernel::of(&spec, Env::Two));
    let (y, p) = (spec.init_position, spec.init_env_prob);
    let direct = p * (-spec.eta1 * t).exp() * k1.fpt_density(t, y) + (1.0 - p) * k2.fpt_density(t, y);
    if p == 0.0 {
        return Ok(direct);
    }
    let conv = switch_convolution(
        &spec,
        t,
        0.0,
        settings,
        |z, tau| k1.absorbed_density(z, tau, y),
        |z, u| k2.fpt_density(u, z),
    )?;
    Ok(direct + p * conv)
}

/// [`fpt_density`] on a grid of times, evaluated in parallel; the output
/// order follows `ts`.
pub fn fpt_density_grid(spec: &DiffusionSpec, ts: &[f64], settings: &NumericSettings) -> Result<Vec<f64>> {
    ts.par_iter().map(|&t| fpt_density(spec, t, settings)).collect()
}

/// (f₁(x, t), f₂(x, t)) on a grid of positions, evaluated in parallel.
pub fn transient_density_grid(
    spec: &DiffusionSpec,
    xs: &[f64],
    t: f64,
    settings: &NumericSettings,
) -> Result<Vec<[f64; 2]>> {
    xs.par_iter()
        .map(|&x| {
            Ok([
                transient_density(spec, x, Env::One, t, settings)?,
                transient_density(spec, x, Env::Two, t, settings)?,
            ])
        })
        .collect()
}

// (e^{-yζ} − e^{-yθ}) / (θ − ζ), continuous through θ = ζ.
fn exp_difference_quotient(y: f64, zeta: f64, theta: f64) -> f64 {
    let d = theta - zeta;
    if d == 0.0 {
        return y * (-y * zeta).exp();
    }
    (-y * zeta).exp() * -(-y * d).exp_m1() / d
}

fn laplace_at(spec: &DiffusionSpec, s: f64) -> Result<f64> {
    let r = LaplaceRootsDiffusion::unchecked(spec, s)?;
    let (y, p) = (spec.init_position, spec.init_env_prob);
    let cross = 2.0 * spec.eta1 * p / (spec.omega1_sq * (r.theta1 - r.zeta2))
        * exp_difference_quotient(y, r.zeta1, r.theta1);
    Ok(p * (-y * r.zeta1).exp() + (1.0 - p) * (-y * r.theta1).exp() + cross)
}

/// K(s | y) = ∫₀^∞ e^{−st} k(0, t | y) dt.
pub fn fpt_laplace(spec: &DiffusionSpec, s: f64) -> Result<f64> {
    let spec = require_eta2_zero(spec)?;
    require_positive_start(&spec)?;
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("Laplace argument must be >= 0, got {s}")));
    }
    laplace_at(&spec, s)
}

/// P(T_y < ∞).
pub fn absorption_probability(spec: &DiffusionSpec) -> Result<f64> {
    let spec = require_eta2_zero(spec)?;
    require_positive_start(&spec)?;
    if spec.lambda2s <= spec.mu2s {
        return Ok(1.0);
    }
    laplace_at(&spec, 0.0)
}

/// E(T_y), finite only when λ₂* < μ₂*.
pub fn fpt_mean(spec: &DiffusionSpec) -> Result<f64> {
    let spec = require_eta2_zero(spec)?;
    require_positive_start(&spec)?;
    if spec.lambda2s >= spec.mu2s {
        return Err(Error::UndefinedMean("FPT mean undefined: λ₂* ≥ μ₂*".into()));
    }
    let (y, p) = (spec.init_position, spec.init_env_prob);
    let g2 = spec.mu2s - spec.lambda2s;
    let g1 = spec.mu1s - spec.lambda1s;
    let zeta1 = LaplaceRootsDiffusion::unchecked(&spec, 0.0)?.zeta1;
    Ok(y / g2 + p / spec.eta1 * (1.0 - g1 / g2) * -(-y * zeta1).exp_m1())
}
