//! Heavy-traffic diffusion approximation: a Wiener process on [0, ∞) whose
//! drift and variance switch with the environment.

mod compare;
mod steady;
mod switching;
mod wiener;

pub use compare::{compare_scaled, ComparisonRow, ScaledComparison};
pub use steady::{
    characteristic_cubic_diffusion, diffusion_roots, scaled_residual_diffusion, solve_steady_density,
    CubicRootsDiffusion, SteadyDensitySolution,
};
pub use switching::{
    absorbed_transient_density, absorption_probability, fpt_density, fpt_density_grid, fpt_laplace,
    fpt_mean, transient_density, transient_density_grid, LaplaceRootsDiffusion,
};
pub use wiener::{absorbed_wiener_density, reflected_wiener_density, wiener_fpt_density, WienerKernel};
