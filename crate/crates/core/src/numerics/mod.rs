//! Special functions and numerical primitives shared by the analytic modules.

mod bessel;
mod cubic;
mod erf;
mod quadrature;
mod series;

pub use bessel::{bessel_i_scaled, bessel_i_scaled_seq};
pub use cubic::{eval_cubic, solve_cubic, CubicRoots};
pub use erf::{erfc, exp_erfc};
pub use quadrature::{integrate, integrate_pieces, integrate_with_error, QuadratureSettings};
pub use series::{sum_series, SeriesSettings, QUIET_RUN};

/// Quadrature and series settings bundled together; most analytic routines
/// need both.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct NumericSettings {
    pub quadrature: QuadratureSettings,
    pub series: SeriesSettings,
}

/// `(a^m - b^m) / (a - b)` as the finite sum `Σ_{k<m} a^k b^{m-1-k}`, which
/// stays exact when `a` and `b` coincide.
pub fn power_difference_quotient(a: f64, b: f64, m: u32) -> f64 {
    (0..m).map(|k| a.powi(k as i32) * b.powi((m - 1 - k) as i32)).sum()
}
