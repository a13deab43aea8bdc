//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any single subinterval.
    pub max_depth: u32,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_depth: 40,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_depth < 1 {
            return Err(Error::Domain(format!(
                "quadrature settings need abs_tol > 0, rel_tol > 0, max_depth >= 1: {self:?}"
            )));
        }
        Ok(())
    }

    /// Same settings with both tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            max_depth: self.max_depth,
        }
    }
}

/// Hard cap on live subintervals, independent of `max_depth`.
const MAX_INTERVALS: usize = 20_000;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq()
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, depth: u32) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let round_off = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(round_off);
    }
    Piece {
        a,
        b,
        value,
        error,
        depth,
    }
}

/// Integrates `f` over `[a, b]`. `b` may be `f64::INFINITY`, in which case the
/// half-line is mapped onto `[0, 1)` through `x = a + u/(1-u)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<f64> {
    integrate_with_error(f, a, b, settings).map(|(v, _)| v)
}

/// Like [`integrate`] but also returns the final error estimate.
pub fn integrate_with_error<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<(f64, f64)> {
    if b == f64::INFINITY {
        if !a.is_finite() {
            return Err(Error::Domain("lower limit must be finite".into()));
        }
        let mapped = move |u: f64| {
            let w = 1.0 - u;
            let x = a + u / w;
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v / (w * w)
            }
        };
        return adaptive(mapped, &[0.0, 1.0], settings);
    }
    adaptive(f, &[a, b], settings)
}

/// Integrates over `[points[0], points[last]]`, starting with the given
/// breakpoints as the initial partition. Use it when the integrand has narrow
/// features at known locations that a coarse first pass could miss.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(
    f: F,
    points: &[f64],
    settings: &QuadratureSettings,
) -> Result<f64> {
    adaptive(f, points, settings).map(|(v, _)| v)
}

fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    settings: &QuadratureSettings,
) -> Result<(f64, f64)> {
    settings.validate()?;
    if points.len() < 2 {
        return Err(Error::Domain("need at least two integration limits".into()));
    }
    let (lo, hi) = (points[0], points[points.len() - 1]);
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("invalid integration range [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok((0.0, 0.0));
    }

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in points.windows(2) {
        if w[1] < w[0] {
            return Err(Error::Domain("breakpoints must be sorted".into()));
        }
        if w[1] == w[0] {
            continue;
        }
        let p = kronrod(&mut f, w[0], w[1], 0);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }

    loop {
        let tol = settings.abs_tol.max(settings.rel_tol * total.abs());
        if total_err <= tol {
            return Ok((total, total_err));
        }
        let worst = heap.pop().expect("heap holds at least one piece");
        if worst.depth >= settings.max_depth || heap.len() + 2 > MAX_INTERVALS {
            return Err(Error::QuadratureNonConvergence {
                a: lo,
                b: hi,
                estimate: total,
                error: total_err,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod(&mut f, worst.a, mid, worst.depth + 1);
        let right = kronrod(&mut f, mid, worst.b, worst.depth + 1);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Re-sum occasionally so cancellation in the running totals cannot
        // leave a stale error estimate.
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
}
