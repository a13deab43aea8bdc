//! Exponentially scaled modified Bessel functions of the first kind, `e^{-x} I_n(x)`.
//!
//! Every transition probability of the M/M/1 kernels carries a factor
//! `e^{-(λ+μ)t} I_n(2t√(λμ))`, which overflows long before the product does.
//! Only the scaled form is ever exposed.
//!
//! For `x <= 30` each order is summed from its power series (all terms
//! positive, so there is no cancellation). Above that the whole sequence of
//! orders comes from Miller's backward recurrence, normalised by `e^{-x} I_0(x)`
//! from its asymptotic expansion.

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 30.0;
const RESCALE_AT: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// `e^{-x} I_order(x)` for `x >= 0`.
pub fn bessel_i_scaled(order: u32, x: f64) -> Result<f64> {
    let seq = bessel_i_scaled_seq(order as usize, x)?;
    Ok(seq[order as usize])
}

/// `e^{-x} I_n(x)` for every `n` in `0..=max_order`.
///
/// One call is much cheaper than `max_order + 1` calls to [`bessel_i_scaled`]
/// when `x` is large, since the backward recurrence produces all orders at once.
pub fn bessel_i_scaled_seq(max_order: usize, x: f64) -> Result<Vec<f64>> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "bessel_i_scaled requires a finite x >= 0, got {x}"
        )));
    }
    let mut out = vec![0.0; max_order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    if x <= SERIES_LIMIT {
        series_seq(x, &mut out);
    } else {
        miller_seq(x, &mut out);
    }
    Ok(out)
}

fn series_seq(x: f64, out: &mut [f64]) {
    let half = 0.5 * x;
    let quarter_sq = half * half;
    let scale = (-x).exp();
    // (x/2)^n / n!, updated order by order.
    let mut lead = 1.0;
    for (n, slot) in out.iter_mut().enumerate() {
        if n > 0 {
            lead *= half / n as f64;
        }
        if lead == 0.0 {
            break;
        }
        let mut term = lead;
        let mut sum = lead;
        let mut k = 1.0;
        loop {
            term *= quarter_sq / (k * (k + n as f64));
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
            k += 1.0;
        }
        *slot = sum * scale;
    }
}

fn miller_seq(x: f64, out: &mut [f64]) {
    let max_order = out.len() - 1;
    // Start far enough above both max_order and the ~sqrt(x) width of the
    // order profile that the minimal solution has died out by order max_order.
    let nm = max_order as f64;
    let start = ((nm * nm + 60.0 * x).sqrt().ceil() as usize + 40).max(max_order + 20);

    let mut above = 0.0;
    let mut cur = 1.0;
    for k in (1..=start).rev() {
        let below = above + (2.0 * k as f64 / x) * cur;
        above = cur;
        cur = below;
        if cur > RESCALE_AT {
            cur *= RESCALE_BY;
            above *= RESCALE_BY;
            for v in out.iter_mut().skip(k) {
                *v *= RESCALE_BY;
            }
        }
        if k - 1 <= max_order {
            out[k - 1] = cur;
        }
    }
    let norm = i0_scaled_asymptotic(x) / out[0];
    for v in out.iter_mut() {
        *v *= norm;
    }
}

/// Hankel expansion of `e^{-x} I_0(x)`; accurate to rounding for `x > 30`.
fn i0_scaled_asymptotic(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * odd * odd / (8.0 * k as f64 * x);
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}
