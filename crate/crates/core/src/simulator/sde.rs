use super::{
    batch_means, run_replications, stream, EmpiricalEstimate, FirstPassageSample, SimConfig, BATCHES_PER_PATH,
};
use crate::error::{Error, Result};
use crate::model::{DiffusionSpec, Env, StabilityCase};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PathMode {
    /// Reflect at 0 and report the state at `until`.
    Reflect { until: f64 },
    /// Stop at the first passage through 0, censoring at the config horizon.
    Absorb,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PathOutcome {
    Terminal { x: f64, env: Env },
    Hit { time: f64 },
    Censored,
}

/// Density estimates on the bins `[edges[k], edges[k+1])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionHistogram {
    pub edges: Vec<f64>,
    pub env1: Vec<EmpiricalEstimate>,
    pub env2: Vec<EmpiricalEstimate>,
    pub total: Vec<EmpiricalEstimate>,
    pub warnings: Vec<String>,
}

impl DiffusionHistogram {
    pub fn centres(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

struct Walker {
    drift: [f64; 2],
    sd: [f64; 2],
    eta: [f64; 2],
    dt: f64,
}

enum Stop {
    Time(f64, Env),
    Hit(f64),
}

impl Walker {
    fn new(spec: &DiffusionSpec, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("time step must be finite and > 0, got {dt}")));
        }
        Ok(Self {
            drift: [spec.drift(Env::One), spec.drift(Env::Two)],
            sd: [spec.omega1_sq.sqrt(), spec.omega2_sq.sqrt()],
            eta: [spec.eta1, spec.eta2],
            dt,
        })
    }

    fn holding(&self, env: Env, rng: &mut ChaCha8Rng) -> f64 {
        let eta = self.eta[env.index() - 1];
        if eta == 0.0 {
            f64::INFINITY
        } else {
            rng.sample::<f64, _>(Exp1) / eta
        }
    }

    /// Runs from (x, env) at time 0 to `t_end`, calling `visit(x, env, h)` for
    /// each step of length h that starts at x.
    fn run<V: FnMut(f64, Env, f64)>(
        &self,
        mut x: f64,
        mut env: Env,
        t_end: f64,
        absorb: bool,
        rng: &mut ChaCha8Rng,
        mut visit: V,
    ) -> Stop {
        let mut t = 0.0;
        let mut switch_at = self.holding(env, rng);
        while t < t_end {
            let to_switch = switch_at - t;
            let to_end = t_end - t;
            let h = self.dt.min(to_switch).min(to_end);
            let switching = to_switch <= self.dt && to_switch <= to_end;
            let i = env.index() - 1;
            let z: f64 = rng.sample(StandardNormal);
            let mut next = x + self.drift[i] * h + self.sd[i] * h.sqrt() * z;
            if absorb {
                if next <= 0.0 {
                    return Stop::Hit(t + h * x / (x - next));
                }
                let cross = (-2.0 * x * next / (self.sd[i] * self.sd[i] * h)).exp();
                if rng.random::<f64>() < cross {
                    return Stop::Hit(t + 0.5 * h);
                }
            } else {
                next = next.abs();
            }
            visit(x, env, h);
            x = next;
            if switching {
                t = switch_at;
                env = env.other();
                switch_at = t + self.holding(env, rng);
            } else {
                t += h;
            }
        }
        Stop::Time(x, env)
    }
}

fn start(spec: &DiffusionSpec, rng: &mut ChaCha8Rng) -> Env {
    if rng.random::<f64>() < spec.init_env_prob {
        Env::One
    } else {
        Env::Two
    }
}

/// One Euler path of the switching Wiener process with step `dt`.
pub fn simulate_diffusion_path(
    spec: &DiffusionSpec,
    config: &SimConfig,
    dt: f64,
    replication_index: u64,
    mode: PathMode,
) -> Result<PathOutcome> {
    let spec = spec.validate()?;
    let config = config.validate()?;
    let walker = Walker::new(&spec, dt)?;
    let mut rng = stream(config.seed, replication_index);
    let env = start(&spec, &mut rng);
    Ok(match mode {
        PathMode::Reflect { until } => {
            match walker.run(spec.init_position, env, until, false, &mut rng, |_, _, _| ()) {
                Stop::Time(x, env) => PathOutcome::Terminal { x, env },
                Stop::Hit(_) => unreachable!("reflected paths are never absorbed"),
            }
        }
        PathMode::Absorb => {
            if !(spec.init_position > 0.0) {
                return Err(Error::Domain("first passage needs y > 0".into()));
            }
            match walker.run(spec.init_position, env, config.horizon, true, &mut rng, |_, _, _| ()) {
                Stop::Time(..) => PathOutcome::Censored,
                Stop::Hit(time) => PathOutcome::Hit { time },
            }
        }
    })
}

/// First-passage times through 0 over independent replications.
pub fn estimate_diffusion_fpt(spec: &DiffusionSpec, config: &SimConfig, dt: f64) -> Result<FirstPassageSample> {
    let spec = spec.validate()?;
    let config = config.validate()?;
    if !(spec.init_position > 0.0) {
        return Err(Error::Domain("first passage needs y > 0".into()));
    }
    let walker = Walker::new(&spec, dt)?;
    let outcomes = run_replications(config.replications, config.worker_hint, |i| {
        let mut rng = stream(config.seed, i);
        let env = start(&spec, &mut rng);
        match walker.run(spec.init_position, env, config.horizon, true, &mut rng, |_, _, _| ()) {
            Stop::Hit(t) => Some(t),
            Stop::Time(..) => None,
        }
    });
    Ok(FirstPassageSample::from_outcomes(outcomes))
}

fn check_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) || !(edges[0] >= 0.0) {
        return Err(Error::Domain("bin edges must be >= 0, strictly increasing, at least two".into()));
    }
    Ok(())
}

fn bin_of(edges: &[f64], x: f64) -> Option<usize> {
    let k = edges.partition_point(|&e| e <= x);
    (k >= 1 && k < edges.len()).then(|| k - 1)
}

/// Histogram estimate of (f₁(x, t), f₂(x, t)) from reflected Euler paths.
pub fn estimate_diffusion_transient(
    spec: &DiffusionSpec,
    t: f64,
    dt: f64,
    edges: &[f64],
    config: &SimConfig,
) -> Result<DiffusionHistogram> {
    let spec = spec.validate()?;
    let config = config.validate()?;
    check_edges(edges)?;
    let walker = Walker::new(&spec, dt)?;
    let finals = run_replications(config.replications, config.worker_hint, |i| {
        let mut rng = stream(config.seed, i);
        let env = start(&spec, &mut rng);
        match walker.run(spec.init_position, env, t, false, &mut rng, |_, _, _| ()) {
            Stop::Time(x, env) => (x, env),
            Stop::Hit(_) => unreachable!("reflected paths are never absorbed"),
        }
    });
    let bins = edges.len() - 1;
    let mut counts = vec![[0u64; 2]; bins];
    for (x, env) in finals {
        if let Some(k) = bin_of(edges, x) {
            counts[k][env.index() - 1] += 1;
        }
    }
    let n = config.replications;
    let density = |c: u64, k: usize| {
        let mut e = EmpiricalEstimate::proportion(c, n);
        let w = edges[k + 1] - edges[k];
        e.value /= w;
        e.std_error /= w;
        e
    };
    Ok(DiffusionHistogram {
        edges: edges.to_vec(),
        env1: (0..bins).map(|k| density(counts[k][0], k)).collect(),
        env2: (0..bins).map(|k| density(counts[k][1], k)).collect(),
        total: (0..bins).map(|k| density(counts[k][0] + counts[k][1], k)).collect(),
        warnings: Vec::new(),
    })
}

/// Time-average histogram of long reflected Euler paths over
/// [burn_in, horizon], with batch-means standard errors.
pub fn estimate_diffusion_stationary(
    spec: &DiffusionSpec,
    config: &SimConfig,
    dt: f64,
    edges: &[f64],
) -> Result<DiffusionHistogram> {
    let spec = spec.validate()?;
    let config = config.validate()?;
    check_edges(edges)?;
    if spec.classify() == StabilityCase::NoSteadyState {
        return Err(Error::NoSteadyState(format!(
            "η₁(μ₂*−λ₂*)+η₂(μ₁*−λ₁*) = {}",
            spec.drift_balance()
        )));
    }
    let mut warnings = Vec::new();
    let scale = (spec.eta1 + spec.eta2).min(
        Env::BOTH
            .iter()
            .map(|&e| spec.drift(e).powi(2) / (2.0 * spec.variance(e)))
            .fold(0.0, f64::max),
    );
    if config.burn_in < 10.0 / scale {
        let msg = format!("burn-in {} is shorter than 10 relaxation times ({:.4})", config.burn_in, 10.0 / scale);
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let walker = Walker::new(&spec, dt)?;
    let bins = edges.len() - 1;
    let span = (config.horizon - config.burn_in) / BATCHES_PER_PATH as f64;
    let paths = run_replications(config.replications, config.worker_hint, |i| {
        let mut rng = stream(config.seed, i);
        let env = start(&spec, &mut rng);
        let mut occ = vec![vec![[0.0f64; 2]; bins]; BATCHES_PER_PATH];
        let mut clock = 0.0;
        walker.run(spec.init_position, env, config.horizon, false, &mut rng, |x, env, h| {
            let t0 = clock;
            clock += h;
            if t0 < config.burn_in {
                return;
            }
            let batch = (((t0 - config.burn_in) / span) as usize).min(BATCHES_PER_PATH - 1);
            if let Some(k) = bin_of(edges, x) {
                occ[batch][k][env.index() - 1] += h / span;
            }
        });
        occ
    });
    let column = |k: usize, pick: &dyn Fn(&[f64; 2]) -> f64| {
        let w = edges[k + 1] - edges[k];
        let values: Vec<f64> = paths.iter().flatten().map(|b| pick(&b[k]) / w).collect();
        let mut e = batch_means(&values);
        e.count = config.replications;
        e
    };
    Ok(DiffusionHistogram {
        edges: edges.to_vec(),
        env1: (0..bins).map(|k| column(k, &|c| c[0])).collect(),
        env2: (0..bins).map(|k| column(k, &|c| c[1])).collect(),
        total: (0..bins).map(|k| column(k, &|c| c[0] + c[1])).collect(),
        warnings,
    })
}
