//! Real roots of a cubic with three real roots.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The three real roots of a cubic, sorted in decreasing order.
///
/// The characteristic polynomials of both the discrete and the diffusion model
/// are known to have three real roots; which root plays which role is decided
/// by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicRoots(pub [f64; 3]);

impl CubicRoots {
    pub fn as_slice(&self) -> &[f64; 3] {
        &self.0
    }
}

/// Horner evaluation of `c3 z³ + c2 z² + c1 z + c0`.
pub fn eval_cubic(coeffs: [f64; 4], z: f64) -> f64 {
    let [c3, c2, c1, c0] = coeffs;
    ((c3 * z + c2) * z + c1) * z + c0
}

fn eval_derivative(coeffs: [f64; 4], z: f64) -> f64 {
    let [c3, c2, c1, _] = coeffs;
    (3.0 * c3 * z + 2.0 * c2) * z + c1
}

/// Solves `c3 z³ + c2 z² + c1 z + c0 = 0` assuming three real roots.
///
/// Uses the trigonometric form of the depressed cubic, then polishes each
/// root with Newton steps on the original coefficients. Returns
/// [`Error::ComplexRoots`] if the discriminant shows a complex pair whose
/// imaginary part is not negligible.
pub fn solve_cubic(c3: f64, c2: f64, c1: f64, c0: f64) -> Result<CubicRoots> {
    if c3 == 0.0 || !c3.is_finite() {
        return Err(Error::Domain(format!(
            "leading coefficient must be finite and nonzero, got {c3}"
        )));
    }
    if ![c2, c1, c0].iter().all(|c| c.is_finite()) {
        return Err(Error::Domain("non-finite cubic coefficient".into()));
    }
    let a = c2 / c3;
    let b = c1 / c3;
    let c = c0 / c3;

    // z = w - a/3 gives w³ + p w + q = 0.
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;

    let mut roots = if disc <= 0.0 {
        // Three real roots (p <= 0 here).
        let r = (-third_p).sqrt();
        if r == 0.0 {
            [-shift; 3]
        } else {
            let cos_arg = (-half_q / (r * r * r)).clamp(-1.0, 1.0);
            let phi = cos_arg.acos() / 3.0;
            let two_r = 2.0 * r;
            let tau = 2.0 * std::f64::consts::PI / 3.0;
            [
                two_r * phi.cos() - shift,
                two_r * (phi - tau).cos() - shift,
                two_r * (phi + tau).cos() - shift,
            ]
        }
    } else {
        // One real root and a complex pair; acceptable only if the pair is
        // numerically a double root.
        let sq = disc.sqrt();
        let u = (-half_q + sq).cbrt();
        let v = (-half_q - sq).cbrt();
        let imag = 0.5 * 3f64.sqrt() * (u - v).abs();
        let real = u + v - shift;
        let pair = -0.5 * (u + v) - shift;
        let scale = 1.0f64.max(real.abs()).max(pair.abs());
        if imag > 1e-7 * scale {
            return Err(Error::ComplexRoots { imag });
        }
        [real, pair, pair]
    };

    let coeffs = [c3, c2, c1, c0];
    for root in roots.iter_mut() {
        *root = polish(coeffs, *root);
    }
    roots.sort_by(|x, y| y.total_cmp(x));
    Ok(CubicRoots(roots))
}

fn polish(coeffs: [f64; 4], mut z: f64) -> f64 {
    let mut res = eval_cubic(coeffs, z).abs();
    for _ in 0..4 {
        let d = eval_derivative(coeffs, z);
        if d == 0.0 || res == 0.0 {
            break;
        }
        let cand = z - eval_cubic(coeffs, z) / d;
        let cand_res = eval_cubic(coeffs, cand).abs();
        if cand_res < res {
            z = cand;
            res = cand_res;
        } else {
            break;
        }
    }
    z
}
