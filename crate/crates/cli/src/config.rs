//! TOML run configuration.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use switchq::numerics::NumericSettings;
use switchq::simulator::SimConfig;
use switchq::{DiffusionSpec, QueueSpec};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Steady,
    Transient,
    Fpt,
    Diffusion,
    Simulate,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Steady => "steady",
            Command::Transient => "transient",
            Command::Fpt => "fpt",
            Command::Diffusion => "diffusion",
            Command::Simulate => "simulate",
            Command::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// What the `simulate` command estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimTarget {
    Steady,
    Transient,
    Fpt,
    DiffusionStationary,
    DiffusionTransient,
    DiffusionFpt,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub queue: Option<QueueSpec>,
    pub diffusion: Option<DiffusionSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grids {
    pub n_min: u64,
    pub n_max: Option<u64>,
    pub n_step: u64,
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub s: Vec<f64>,
    pub epsilon: Vec<f64>,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            n_min: 0,
            n_max: None,
            n_step: 1,
            t: Vec::new(),
            x: Vec::new(),
            s: Vec::new(),
            epsilon: Vec::new(),
        }
    }
}

impl Grids {
    /// Levels `n_min, n_min + n_step, ..., <= n_max`; empty without `n_max`.
    pub fn levels(&self) -> Vec<u64> {
        match self.n_max {
            Some(max) if self.n_step > 0 => (self.n_min..=max).step_by(self.n_step as usize).collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    /// Report the mean first-passage time as well as its probability.
    pub fpt_mean: bool,
    pub simulate: Option<SimTarget>,
    /// Euler step for diffusion simulations.
    pub sim_dt: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            fpt_mean: false,
            simulate: None,
            sim_dt: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    #[serde(default)]
    pub model: ModelBlock,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub output: OutputBlock,
    pub sim: Option<SimConfig>,
    #[serde(default)]
    pub numerics: NumericSettings,
    #[serde(default)]
    pub options: Options,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn queue(&self) -> Result<QueueSpec, CliError> {
        let q = self
            .model
            .queue
            .ok_or_else(|| CliError::Config("missing [model.queue] section".into()))?;
        Ok(q.validate()?)
    }

    pub fn diffusion(&self) -> Result<DiffusionSpec, CliError> {
        let d = self
            .model
            .diffusion
            .ok_or_else(|| CliError::Config("missing [model.diffusion] section".into()))?;
        Ok(d.validate()?)
    }

    pub fn sim(&self) -> Result<SimConfig, CliError> {
        let s = self.sim.ok_or_else(|| CliError::Config("missing [sim] section".into()))?;
        Ok(s.validate()?)
    }

    pub fn target(&self) -> Result<SimTarget, CliError> {
        self.options
            .simulate
            .ok_or_else(|| CliError::Config("options.simulate must name what to simulate".into()))
    }

    /// Checks grid shape and that every block `command` needs is present.
    pub fn validate_for(&self, command: Command) -> Result<(), CliError> {
        if let Some(c) = self.command {
            if c != command {
                return Err(CliError::Config(format!(
                    "config is for command '{}' but '{}' was requested",
                    c.name(),
                    command.name()
                )));
            }
        }
        let g = &self.grids;
        if g.n_step == 0 {
            return Err(CliError::Config("grids.n_step must be >= 1".into()));
        }
        if let Some(max) = g.n_max {
            if max < g.n_min {
                return Err(CliError::Config(format!("grids.n_max = {max} is below n_min = {}", g.n_min)));
            }
        }
        for (name, v, lower) in [("t", &g.t, 0.0), ("x", &g.x, 0.0), ("s", &g.s, 0.0), ("epsilon", &g.epsilon, 0.0)] {
            check_sorted(name, v, lower)?;
        }
        if g.epsilon.contains(&0.0) {
            return Err(CliError::Config("grids.epsilon values must be > 0".into()));
        }
        if !(self.options.sim_dt > 0.0) || !self.options.sim_dt.is_finite() {
            return Err(CliError::Config("options.sim_dt must be finite and > 0".into()));
        }
        self.numerics.quadrature.validate()?;
        self.numerics.series.validate()?;

        let need_levels = || require(!g.levels().is_empty(), "grids.n_max (a nonempty level range)");
        let need = |name: &str, v: &[f64]| require(!v.is_empty(), &format!("grids.{name} (nonempty)"));
        match command {
            Command::Steady => {
                self.queue()?;
                need_levels()?;
            }
            Command::Transient => {
                self.queue()?;
                need_levels()?;
                need("t", &g.t)?;
            }
            Command::Fpt => {
                self.queue()?;
                need("t", &g.t)?;
            }
            Command::Diffusion => {
                self.diffusion()?;
                require(
                    !(g.x.is_empty() && g.t.is_empty() && g.s.is_empty()),
                    "at least one of grids.x, grids.t, grids.s",
                )?;
            }
            Command::Compare => {
                self.diffusion()?;
                need_levels()?;
                need("epsilon", &g.epsilon)?;
            }
            Command::Simulate => {
                self.sim()?;
                match self.target()? {
                    SimTarget::Steady => {
                        self.queue()?;
                    }
                    SimTarget::Transient => {
                        self.queue()?;
                        need("t", &g.t)?;
                    }
                    SimTarget::Fpt => {
                        self.queue()?;
                    }
                    SimTarget::DiffusionFpt => {
                        self.diffusion()?;
                    }
                    SimTarget::DiffusionStationary => {
                        self.diffusion()?;
                        require(g.x.len() >= 2, "grids.x with at least two bin edges")?;
                    }
                    SimTarget::DiffusionTransient => {
                        self.diffusion()?;
                        need("t", &g.t)?;
                        require(g.x.len() >= 2, "grids.x with at least two bin edges")?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn require(ok: bool, what: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!("missing {what}")))
    }
}

fn check_sorted(name: &str, v: &[f64], lower: f64) -> Result<(), CliError> {
    if let Some(bad) = v.iter().find(|x| !x.is_finite() || **x < lower) {
        return Err(CliError::Config(format!("grids.{name} contains {bad}; values must be finite and >= {lower}")));
    }
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config(format!("grids.{name} must be strictly increasing")));
    }
    Ok(())
}
