use super::{
    batch_means, run_replications, stream, EmpiricalEstimate, EmpiricalPmf, FirstPassageSample, SimConfig,
    BATCHES_PER_PATH,
};
use crate::error::{Error, Result};
use crate::model::{Env, QueueSpec, StabilityCase};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    Arrival,
    Service,
    Switch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathEvent {
    pub time: f64,
    pub kind: EventKind,
    pub level: u64,
    pub env: Env,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CtmcPath {
    pub initial: (u64, Env),
    /// Events in (0, horizon], in time order.
    pub events: Vec<PathEvent>,
    /// State at the horizon.
    pub terminal: (u64, Env),
}

#[derive(Debug, Clone, Copy)]
struct State {
    level: u64,
    env: Env,
}

fn initial_state(spec: &QueueSpec, rng: &mut ChaCha8Rng) -> State {
    let env = if rng.random::<f64>() < spec.init_env_prob { Env::One } else { Env::Two };
    State {
        level: spec.init_state,
        env,
    }
}

/// Holding time in `s` and the event that ends it; the state is updated.
fn step(spec: &QueueSpec, s: &mut State, rng: &mut ChaCha8Rng) -> f64 {
    step_kind(spec, s, rng).0
}

fn step_kind(spec: &QueueSpec, s: &mut State, rng: &mut ChaCha8Rng) -> (f64, EventKind) {
    let lambda = spec.lambda(s.env);
    let mu = if s.level > 0 { spec.mu(s.env) } else { 0.0 };
    let total = lambda + mu + spec.eta(s.env);
    let dt = rng.sample::<f64, _>(Exp1) / total;
    let u = rng.random::<f64>() * total;
    let kind = if u < lambda {
        s.level += 1;
        EventKind::Arrival
    } else if u < lambda + mu {
        s.level -= 1;
        EventKind::Service
    } else {
        s.env = s.env.other();
        EventKind::Switch
    };
    (dt, kind)
}

/// One path of the switching queue on [0, horizon], with every event
/// recorded. `replication_index` selects the random stream.
pub fn simulate_ctmc_path(spec: &QueueSpec, config: &SimConfig, replication_index: u64) -> Result<CtmcPath> {
    let spec = spec.validate()?;
    let config = config.validate()?;
    let mut rng = stream(config.seed, replication_index);
    let mut s = initial_state(&spec, &mut rng);
    let initial = (s.level, s.env);
    let mut events = Vec::new();
    let mut t = 0.0;
    loop {
        let mut next = s;
        let (dt, kind) = step_kind(&spec, &mut next, &mut rng);
        if t + dt > config.horizon {
            break;
        }
        t += dt;
        s = next;
        events.push(PathEvent {
            time: t,
            kind,
            level: s.level,
            env: s.env,
        });
    }
    Ok(CtmcPath {
        initial,
        events,
        terminal: (s.level, s.env),
    })
}

fn state_at(spec: &QueueSpec, t_end: f64, rng: &mut ChaCha8Rng) -> State {
    let mut s = initial_state(spec, rng);
    let mut t = 0.0;
    loop {
        let mut next = s;
        let dt = step(spec, &mut next, rng);
        if t + dt > t_end {
            return s;
        }
        t += dt;
        s = next;
    }
}

fn pmf_from_counts(counts: &[[u64; 2]], n: u64, warnings: Vec<String>) -> EmpiricalPmf {
    let col = |i: usize| counts.iter().map(|c| EmpiricalEstimate::proportion(c[i], n)).collect();
    EmpiricalPmf {
        env1: col(0),
        env2: col(1),
        warnings,
    }
}

/// Frequencies of {N(t) = n, E(t) = i} over independent replications.
pub fn estimate_transient_pmf(spec: &QueueSpec, t: f64, config: &SimConfig) -> Result<EmpiricalPmf> {
    let spec = spec.validate()?;
    let config = config.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
    }
    let finals = run_replications(config.replications, config.worker_hint, |i| {
        let mut rng = stream(config.seed, i);
        let s = state_at(&spec, t, &mut rng);
        (s.level, s.env)
    });
    let top = finals.iter().map(|f| f.0).max().unwrap_or(0) as usize;
    let mut counts = vec![[0u64; 2]; top + 1];
    for (n, e) in finals {
        counts[n as usize][e.index() - 1] += 1;
    }
    Ok(pmf_from_counts(&counts, config.replications, Vec::new()))
}

fn relaxation_scale(spec: &QueueSpec) -> f64 {
    let gap = |e: Env| (spec.mu(e).sqrt() - spec.lambda(e).sqrt()).powi(2);
    (spec.eta1 + spec.eta2).min(gap(Env::One).max(gap(Env::Two)))
}

/// Time-average occupancy of each (n, i) over [burn_in, horizon]. Each of the
/// `replications` independent paths is cut into [`BATCHES_PER_PATH`] batches;
/// standard errors come from the spread of the batch means.
pub fn estimate_steady_pmf(spec: &QueueSpec, config: &SimConfig) -> Result<EmpiricalPmf> {
    let spec = spec.validate()?;
    let config = config.validate()?;
    if spec.classify() == StabilityCase::NoSteadyState {
        return Err(Error::NoSteadyState(format!(
            "η₁(μ₂−λ₂)+η₂(μ₁−λ₁) = {}",
            spec.drift_balance()
        )));
    }
    let mut warnings = Vec::new();
    let scale = relaxation_scale(&spec);
    if config.burn_in < 10.0 / scale {
        let msg = format!(
            "burn-in {} is shorter than 10 relaxation times ({:.4})",
            config.burn_in,
            10.0 / scale
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let span = (config.horizon - config.burn_in) / BATCHES_PER_PATH as f64;
    let paths = run_replications(config.replications, config.worker_hint, |i| {
        let mut rng = stream(config.seed, i);
        let mut occ: Vec<Vec<[f64; 2]>> = vec![Vec::new(); BATCHES_PER_PATH];
        let mut s = initial_state(&spec, &mut rng);
        let mut t = 0.0;
        while t < config.horizon {
            let mut next = s;
            let dt = step(&spec, &mut next, &mut rng);
            let (a, b) = (t.max(config.burn_in), (t + dt).min(config.horizon));
            if b > a {
                let first = (((a - config.burn_in) / span) as usize).min(BATCHES_PER_PATH - 1);
                let last = (((b - config.burn_in) / span) as usize).min(BATCHES_PER_PATH - 1);
                for (k, row) in occ.iter_mut().enumerate().take(last + 1).skip(first) {
                    let lo = config.burn_in + k as f64 * span;
                    let overlap = b.min(lo + span) - a.max(lo);
                    if overlap > 0.0 {
                        if row.len() <= s.level as usize {
                            row.resize(s.level as usize + 1, [0.0; 2]);
                        }
                        row[s.level as usize][s.env.index() - 1] += overlap / span;
                    }
                }
            }
            t += dt;
            s = next;
        }
        occ
    });
    let top = paths.iter().flatten().map(|r| r.len()).max().unwrap_or(1);
    let mut env = [Vec::with_capacity(top), Vec::with_capacity(top)];
    for n in 0..top {
        for (i, out) in env.iter_mut().enumerate() {
            let values: Vec<f64> = paths
                .iter()
                .flatten()
                .map(|row| row.get(n).map_or(0.0, |c| c[i]))
                .collect();
            let mut est = batch_means(&values);
            est.count = config.replications;
            out.push(est);
        }
    }
    let [env1, env2] = env;
    Ok(EmpiricalPmf { env1, env2, warnings })
}

// Level above which a path in an upward-drifting environment that it can no
// longer leave returns to 0 with probability below 1e-10.
fn escape_level(spec: &QueueSpec, env: Env) -> Option<u64> {
    let (l, m) = (spec.lambda(env), spec.mu(env));
    if spec.eta(env) != 0.0 || l <= m {
        return None;
    }
    Some(spec.init_state + ((1e-10f64).ln() / (m / l).ln()).ceil() as u64)
}

/// First time the level hits 0, per replication. Paths are censored at the
/// horizon and, when the current environment is absorbing and transient, at
/// a level from which return has probability below 1e-10.
pub fn sample_first_emptying(spec: &QueueSpec, config: &SimConfig) -> Result<FirstPassageSample> {
    let spec = spec.validate()?;
    let config = config.validate()?;
    if spec.init_state < 1 {
        return Err(Error::Domain("first emptying needs an initial level j >= 1".into()));
    }
    let caps = [escape_level(&spec, Env::One), escape_level(&spec, Env::Two)];
    let outcomes = run_replications(config.replications, config.worker_hint, |i| {
        let mut rng = stream(config.seed, i);
        let mut s = initial_state(&spec, &mut rng);
        let mut t = 0.0;
        loop {
            t += step(&spec, &mut s, &mut rng);
            if t > config.horizon {
                return None;
            }
            if s.level == 0 {
                return Some(t);
            }
            if caps[s.env.index() - 1].is_some_and(|c| s.level >= c) {
                return None;
            }
        }
    });
    Ok(FirstPassageSample::from_outcomes(outcomes))
}
