use thiserror::Error;

/// Errors produced by the analytic and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a numerical primitive.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model specification violates one of its invariants.
    #[error("invalid specification: {0}")]
    Validation(String),

    /// The parameters admit no stationary distribution.
    #[error("no steady state: {0}")]
    NoSteadyState(String),

    /// The operation is only defined for a restricted parameter regime.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// A mean first-passage time was requested where it is infinite or undefined.
    #[error("{0}")]
    UndefinedMean(String),

    #[error("cubic has complex roots (imaginary part {imag:e})")]
    ComplexRoots { imag: f64 },

    #[error("root classification failed: {0}")]
    RootClassification(String),

    /// The two dominant roots coincide and the mixture weights are singular.
    #[error("confluent roots: |xi1 - xi2| = {gap:e}")]
    ConfluentRoots { gap: f64 },

    #[error("quadrature did not converge on [{a}, {b}]: estimate {estimate:e}, error {error:e}")]
    QuadratureNonConvergence {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
    },

    #[error("series did not converge after {terms} terms (partial sum {partial:e})")]
    SeriesNonConvergence { terms: usize, partial: f64 },

    #[error("invalid environment index {0}; expected 1 or 2")]
    InvalidEnvironment(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
