//! Parameter containers, validation, stability classification and the
//! diffusion-to-queue scaling map.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Environment label. Environment 1 switches to 2 at rate η₁, and 2 to 1 at η₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Env {
    One,
    Two,
}

impl Env {
    pub const BOTH: [Env; 2] = [Env::One, Env::Two];

    pub fn index(self) -> usize {
        match self {
            Env::One => 1,
            Env::Two => 2,
        }
    }

    pub fn other(self) -> Env {
        match self {
            Env::One => Env::Two,
            Env::Two => Env::One,
        }
    }
}

impl TryFrom<usize> for Env {
    type Error = Error;

    fn try_from(i: usize) -> Result<Self> {
        match i {
            1 => Ok(Env::One),
            2 => Ok(Env::Two),
            other => Err(Error::InvalidEnvironment(other)),
        }
    }
}

impl std::fmt::Display for Env {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Rates of the switching M/M/1 queue and its initial condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueueSpec {
    pub lambda1: f64,
    pub mu1: f64,
    pub lambda2: f64,
    pub mu2: f64,
    pub eta1: f64,
    pub eta2: f64,
    /// Initial queue length j.
    #[serde(default)]
    pub init_state: u64,
    /// Probability p that the process starts in environment 1.
    #[serde(default = "default_p")]
    pub init_env_prob: f64,
}

/// Drift and variance parameters of the switching reflected Wiener process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffusionSpec {
    pub lambda1s: f64,
    pub mu1s: f64,
    pub lambda2s: f64,
    pub mu2s: f64,
    pub omega1_sq: f64,
    pub omega2_sq: f64,
    pub eta1: f64,
    pub eta2: f64,
    /// Initial position y.
    #[serde(default)]
    pub init_position: f64,
    #[serde(default = "default_p")]
    pub init_env_prob: f64,
}

fn default_p() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilityCase {
    /// η₂ = 0 and environment 2 is stable; all mass ends in environment 2.
    CaseI,
    /// η₁ = 0 and environment 1 is stable.
    CaseII,
    /// Both switch rates positive and the averaged drift points to 0.
    CaseIII,
    NoSteadyState,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation(format!("{name} must be finite and >= 0, got {v}")))
    }
}

fn switching(eta1: f64, eta2: f64, p: f64) -> Result<()> {
    nonnegative("η₁", eta1)?;
    nonnegative("η₂", eta2)?;
    if !(eta1 + eta2 > 0.0) {
        return Err(Error::Validation("η₁+η₂>0 violated".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Validation(format!(
            "initial environment probability p must lie in [0, 1], got {p}"
        )));
    }
    Ok(())
}

fn classify_rates(eta1: f64, eta2: f64, net1: f64, net2: f64) -> StabilityCase {
    // net_i = μ_i − λ_i (or its starred analogue)
    if eta2 == 0.0 {
        if net2 > 0.0 {
            StabilityCase::CaseI
        } else {
            StabilityCase::NoSteadyState
        }
    } else if eta1 == 0.0 {
        if net1 > 0.0 {
            StabilityCase::CaseII
        } else {
            StabilityCase::NoSteadyState
        }
    } else if eta1 * net2 + eta2 * net1 > 0.0 {
        StabilityCase::CaseIII
    } else {
        StabilityCase::NoSteadyState
    }
}

impl QueueSpec {
    pub fn validate(&self) -> Result<Self> {
        positive("λ₁", self.lambda1)?;
        positive("μ₁", self.mu1)?;
        positive("λ₂", self.lambda2)?;
        positive("μ₂", self.mu2)?;
        switching(self.eta1, self.eta2, self.init_env_prob)?;
        Ok(*self)
    }

    pub fn classify(&self) -> StabilityCase {
        classify_rates(
            self.eta1,
            self.eta2,
            self.mu1 - self.lambda1,
            self.mu2 - self.lambda2,
        )
    }

    pub fn lambda(&self, env: Env) -> f64 {
        match env {
            Env::One => self.lambda1,
            Env::Two => self.lambda2,
        }
    }

    pub fn mu(&self, env: Env) -> f64 {
        match env {
            Env::One => self.mu1,
            Env::Two => self.mu2,
        }
    }

    pub fn eta(&self, env: Env) -> f64 {
        match env {
            Env::One => self.eta1,
            Env::Two => self.eta2,
        }
    }

    /// Probability of starting in `env`.
    pub fn start_prob(&self, env: Env) -> f64 {
        match env {
            Env::One => self.init_env_prob,
            Env::Two => 1.0 - self.init_env_prob,
        }
    }

    /// η₁(μ₂−λ₂) + η₂(μ₁−λ₁).
    pub fn drift_balance(&self) -> f64 {
        self.eta1 * (self.mu2 - self.lambda2) + self.eta2 * (self.mu1 - self.lambda1)
    }

    /// The same queue with environment labels exchanged. Turns an η₁ = 0
    /// problem into the η₂ = 0 form the transient formulas expect.
    pub fn swap_environments(&self) -> Self {
        Self {
            lambda1: self.lambda2,
            mu1: self.mu2,
            lambda2: self.lambda1,
            mu2: self.mu1,
            eta1: self.eta2,
            eta2: self.eta1,
            init_state: self.init_state,
            init_env_prob: 1.0 - self.init_env_prob,
        }
    }

    /// Multiplies every rate by `c`, which only changes the time unit.
    pub fn rescale_time(&self, c: f64) -> Self {
        Self {
            lambda1: self.lambda1 * c,
            mu1: self.mu1 * c,
            lambda2: self.lambda2 * c,
            mu2: self.mu2 * c,
            eta1: self.eta1 * c,
            eta2: self.eta2 * c,
            ..*self
        }
    }
}

impl DiffusionSpec {
    pub fn validate(&self) -> Result<Self> {
        positive("λ₁*", self.lambda1s)?;
        positive("μ₁*", self.mu1s)?;
        positive("λ₂*", self.lambda2s)?;
        positive("μ₂*", self.mu2s)?;
        positive("ω₁²", self.omega1_sq)?;
        positive("ω₂²", self.omega2_sq)?;
        nonnegative("y", self.init_position)?;
        switching(self.eta1, self.eta2, self.init_env_prob)?;
        Ok(*self)
    }

    pub fn classify(&self) -> StabilityCase {
        classify_rates(
            self.eta1,
            self.eta2,
            self.mu1s - self.lambda1s,
            self.mu2s - self.lambda2s,
        )
    }

    /// Drift β = λ* − μ* in `env`.
    pub fn drift(&self, env: Env) -> f64 {
        match env {
            Env::One => self.lambda1s - self.mu1s,
            Env::Two => self.lambda2s - self.mu2s,
        }
    }

    pub fn variance(&self, env: Env) -> f64 {
        match env {
            Env::One => self.omega1_sq,
            Env::Two => self.omega2_sq,
        }
    }

    pub fn eta(&self, env: Env) -> f64 {
        match env {
            Env::One => self.eta1,
            Env::Two => self.eta2,
        }
    }

    pub fn start_prob(&self, env: Env) -> f64 {
        match env {
            Env::One => self.init_env_prob,
            Env::Two => 1.0 - self.init_env_prob,
        }
    }

    /// η₁(μ₂*−λ₂*) + η₂(μ₁*−λ₁*).
    pub fn drift_balance(&self) -> f64 {
        self.eta1 * (self.mu2s - self.lambda2s) + self.eta2 * (self.mu1s - self.lambda1s)
    }

    pub fn swap_environments(&self) -> Self {
        Self {
            lambda1s: self.lambda2s,
            mu1s: self.mu2s,
            lambda2s: self.lambda1s,
            mu2s: self.mu1s,
            omega1_sq: self.omega2_sq,
            omega2_sq: self.omega1_sq,
            eta1: self.eta2,
            eta2: self.eta1,
            init_position: self.init_position,
            init_env_prob: 1.0 - self.init_env_prob,
        }
    }

    /// The queue whose space-scaled length approximates this process:
    /// λᵢ = λᵢ*/ε + ωᵢ²/(2ε²), μᵢ = μᵢ*/ε + ωᵢ²/(2ε²), j = round(y/ε).
    pub fn scale_to_discrete(&self, epsilon: f64) -> Result<QueueSpec> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::Validation(format!("ε must be > 0, got {epsilon}")));
        }
        let base1 = self.omega1_sq / (2.0 * epsilon * epsilon);
        let base2 = self.omega2_sq / (2.0 * epsilon * epsilon);
        let spec = QueueSpec {
            lambda1: self.lambda1s / epsilon + base1,
            mu1: self.mu1s / epsilon + base1,
            lambda2: self.lambda2s / epsilon + base2,
            mu2: self.mu2s / epsilon + base2,
            eta1: self.eta1,
            eta2: self.eta2,
            init_state: (self.init_position / epsilon).round() as u64,
            init_env_prob: self.init_env_prob,
        };
        spec.validate()
    }
}
