//! Complementary error function.

/// `(2/√π) ∫_x^∞ e^{-z²} dz`.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `e^{a} · erfc(z)` without forming either factor separately when one of them
/// would overflow or underflow.
///
/// The reflected Wiener density multiplies `e^{2βx/ω²}` by an erfc whose
/// argument grows with `x`; for positive drift both factors leave the f64 range
/// well before their product does.
pub fn exp_erfc(a: f64, z: f64) -> f64 {
    if z < 5.0 {
        return a.exp() * erfc(z);
    }
    (a - z * z).exp() * erfcx_large(z)
}

// e^{z²} erfc(z) for z >= 5 by the Laplace continued fraction
//   √π e^{z²} erfc(z) = 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))).
fn erfcx_large(z: f64) -> f64 {
    let mut tail = 0.0;
    for k in (1..=60).rev() {
        tail = (k as f64 * 0.5) / (z + tail);
    }
    1.0 / ((z + tail) * std::f64::consts::PI.sqrt())
}
