//! Acceptance suite: runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use switchq::diffusion::{self, WienerKernel};
use switchq::fpt_discrete::{self, LaplaceRootsDiscrete};
use switchq::numerics::NumericSettings;
use switchq::simulator::{self, EmpiricalEstimate, SimConfig};
use switchq::steady_state::{discrete_roots, solve_steady};
use switchq::transient::joint_transient;
use switchq::{DiffusionSpec, Env, QueueSpec};

const SEED: u64 = 0x5EED_2024;

struct Criterion {
    id: u32,
    title: &'static str,
    checks: Vec<(String, bool, String)>,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Self {
            id,
            title,
            checks: Vec::new(),
        }
    }

    fn flag(&mut self, label: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push((label.into(), ok, detail.into()));
    }

    fn abs(&mut self, label: impl Into<String>, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs();
        self.flag(label, err <= tol, format!("got {got:.12e}, want {want:.12e}, |diff| {err:.2e} > {tol:.0e}"));
    }

    fn rel(&mut self, label: impl Into<String>, got: f64, want: f64, tol: f64) {
        let err = ((got - want) / want).abs();
        self.flag(label, err <= tol, format!("got {got:.12e}, want {want:.12e}, rel {err:.2e} > {tol:.0e}"));
    }

    fn within_se(&mut self, label: impl Into<String>, est: &EmpiricalEstimate, target: f64) {
        let z = est.z_score(target);
        self.flag(
            label,
            z <= 3.0,
            format!("estimate {:.6e} ± {:.2e} vs {target:.6e}: {z:.2} SE", est.value, est.std_error),
        );
    }

    fn report(&self, elapsed: f64) -> bool {
        let failed: Vec<_> = self.checks.iter().filter(|c| !c.1).collect();
        let ok = failed.is_empty() && !self.checks.is_empty();
        println!(
            "criterion {:>2} {} {} ({}/{} checks, {elapsed:.1}s)",
            self.id,
            if ok { "PASS" } else { "FAIL" },
            self.title,
            self.checks.len() - failed.len(),
            self.checks.len()
        );
        for (label, _, detail) in failed {
            println!("      {label}: {detail}");
        }
        ok
    }
}

// Composite 20-point Gauss-Legendre on the given breakpoints.
struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    fn new(order: usize) -> Self {
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        for i in 0..order {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=order {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        Self { nodes, weights }
    }

    fn panel<F: FnMut(f64) -> f64>(&self, f: &mut F, a: f64, b: f64) -> f64 {
        let (h, m) = (0.5 * (b - a), 0.5 * (a + b));
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
    }

    fn over<F: FnMut(f64) -> f64>(&self, mut f: F, cuts: &[f64]) -> f64 {
        cuts.windows(2).map(|w| self.panel(&mut f, w[0], w[1])).sum()
    }
}

/// Breakpoints 0, step, 2 step, ... up to `end`, refined geometrically near 0.
fn cuts(end: f64, step: f64) -> Vec<f64> {
    let mut v = vec![0.0];
    let mut x = step / 64.0;
    while x < step {
        v.push(x);
        x *= 2.0;
    }
    let mut k = 1.0;
    while k * step < end {
        v.push(k * step);
        k += 1.0;
    }
    v.push(end);
    v
}

fn base_queue() -> QueueSpec {
    QueueSpec {
        lambda1: 1.0,
        mu1: 0.5,
        lambda2: 1.0,
        mu2: 2.0,
        eta1: 0.1,
        eta2: 0.08,
        init_state: 0,
        init_env_prob: 0.5,
    }
}

fn with_eta(eta1: f64, eta2: f64) -> QueueSpec {
    QueueSpec { eta1, eta2, ..base_queue() }
}

/// η₂ = 0 queue used for first-passage checks.
fn fpt_queue(lambda1: f64, mu1: f64, lambda2: f64, mu2: f64, eta1: f64, j: u64) -> QueueSpec {
    QueueSpec {
        lambda1,
        mu1,
        lambda2,
        mu2,
        eta1,
        eta2: 0.0,
        init_state: j,
        init_env_prob: 0.4,
    }
}

fn base_diffusion() -> DiffusionSpec {
    DiffusionSpec {
        lambda1s: 1.0,
        mu1s: 0.5,
        lambda2s: 1.0,
        mu2s: 2.0,
        omega1_sq: 1.0,
        omega2_sq: 4.0,
        eta1: 0.1,
        eta2: 0.08,
        init_position: 0.0,
        init_env_prob: 1.0,
    }
}

fn diffusion_fpt_spec(lambda2s: f64, mu2s: f64) -> DiffusionSpec {
    DiffusionSpec {
        lambda2s,
        mu2s,
        eta2: 0.0,
        init_position: 1.0,
        init_env_prob: 0.4,
        ..base_diffusion()
    }
}

fn tight() -> NumericSettings {
    let mut s = NumericSettings::default();
    s.quadrature.abs_tol = 1e-11;
    s.quadrature.rel_tol = 1e-11;
    s
}

fn criterion_1() -> Criterion {
    let mut c = Criterion::new(1, "discrete cubic roots");
    match discrete_roots(&base_queue()) {
        Ok(r) => {
            c.abs("xi1", r.xi1, 2.16716, 1e-5);
            c.abs("xi2", r.xi2, 1.08919, 1e-5);
            c.abs("xi3", r.xi3, 0.423647, 1e-5);
        }
        Err(e) => c.flag("roots", false, e.to_string()),
    }
    c
}

fn criterion_2() -> Criterion {
    let mut c = Criterion::new(2, "diffusion cubic roots");
    match diffusion::diffusion_roots(&base_diffusion()) {
        Ok(r) => {
            c.abs("xi1*", r.xi1s, 0.586811, 1e-4);
            c.abs("xi2*", r.xi2s, 0.0871, 1e-4);
            c.abs("xi3*", r.xi3s, -1.17391, 1e-4);
        }
        Err(e) => c.flag("roots", false, e.to_string()),
    }
    c
}

fn criterion_3() -> Criterion {
    let mut c = Criterion::new(3, "reference environment entropies");
    let cases = [
        (0.1, 0.01, 0.0923799, 0.686201, 0.304636),
        (0.1, 0.19, 0.5898, 0.639399, 0.644186),
        (0.06, 0.1, 0.473177, 0.643289, 0.661563),
        (0.6, 0.1, 0.281199, 0.613038, 0.410116),
    ];
    for (e1, e2, h0, hinf, he) in cases {
        match solve_steady(&with_eta(e1, e2)) {
            Ok(sol) => {
                c.abs(format!("H[E|N=0] eta=({e1},{e2})"), sol.entropy_env_given_n(0), h0, 1e-4);
                c.abs(format!("H_inf eta=({e1},{e2})"), sol.entropy_env_limit(), hinf, 1e-4);
                c.abs(format!("H(E) eta=({e1},{e2})"), sol.entropy_env(), he, 1e-4);
            }
            Err(e) => c.flag(format!("solve eta=({e1},{e2})"), false, e.to_string()),
        }
    }
    c
}

fn criterion_4() -> Criterion {
    let mut c = Criterion::new(4, "closed-form identities");
    let s = base_queue();
    let (l1, m1, l2, m2, e1, e2) = (s.lambda1, s.mu1, s.lambda2, s.mu2, s.eta1, s.eta2);
    let balance = e1 * (m2 - l2) + e2 * (m1 - l1);
    let sol = solve_steady(&s).expect("base steady state");
    let r = sol.roots.expect("case III roots");
    let ll = l1 * l2;
    c.rel("P root sum", r.xi1 + r.xi2 + r.xi3, (ll + l1 * m2 + l1 * e2 + l2 * m1 + l2 * e1) / ll, 1e-10);
    c.rel(
        "P pair sum",
        r.xi1 * r.xi2 + r.xi1 * r.xi3 + r.xi2 * r.xi3,
        (l1 * m2 + l2 * m1 + m1 * m2 + m1 * e2 + m2 * e1) / ll,
        1e-10,
    );
    c.rel("P root product", r.xi1 * r.xi2 * r.xi3, m1 * m2 / ll, 1e-10);
    let sign = (r.xi1 - 1.0) * (r.xi2 - 1.0) * (1.0 - r.xi3);
    c.flag("sign identity positive", sign > 0.0, format!("{sign}"));
    c.abs("sign identity value", sign, balance / ll, 1e-10);
    c.abs("boundary identity", m1 * sol.q0[0] + m2 * sol.q0[1], balance / (e1 + e2), 1e-10);
    for (i, env) in Env::BOTH.into_iter().enumerate() {
        let target = [e2, e1][i] / (e1 + e2);
        match sol.pgf(1.0, env) {
            Ok(g) => c.abs(format!("G_{env}(1)"), g, target, 1e-10),
            Err(e) => c.flag(format!("G_{env}(1)"), false, e.to_string()),
        }
    }

    let d = base_diffusion();
    let (w1, w2) = (d.omega1_sq, d.omega2_sq);
    let (b1, b2) = (d.lambda1s - d.mu1s, d.lambda2s - d.mu2s);
    let (g1, g2) = (-b1, -b2);
    let dsol = diffusion::solve_steady_density(&d).expect("base diffusion density");
    let rs = dsol.roots.expect("case III diffusion roots");
    c.rel("P* root sum", rs.xi1s + rs.xi2s + rs.xi3s, 2.0 * (w1 * g2 + w2 * g1) / (w1 * w2), 1e-10);
    c.rel(
        "P* pair sum",
        rs.xi1s * rs.xi2s + rs.xi1s * rs.xi3s + rs.xi2s * rs.xi3s,
        -2.0 * (w1 * d.eta2 - 2.0 * g1 * g2 + w2 * d.eta1) / (w1 * w2),
        1e-10,
    );
    c.rel(
        "P* root product",
        rs.xi1s * rs.xi2s * rs.xi3s,
        -4.0 * (d.eta1 * g2 + d.eta2 * g1) / (w1 * w2),
        1e-10,
    );
    for (i, env) in Env::BOTH.into_iter().enumerate() {
        let target = [d.eta2, d.eta1][i] / (d.eta1 + d.eta2);
        match dsol.mgf(0.0, env) {
            Ok(m) => c.abs(format!("M_{env}(0)"), m, target, 1e-10),
            Err(e) => c.flag(format!("M_{env}(0)"), false, e.to_string()),
        }
    }

    for spec in [fpt_queue(1.0, 0.5, 1.2, 1.0, 0.3, 1), fpt_queue(0.5, 1.0, 1.0, 2.0, 0.7, 1)] {
        for sv in [0.0, 0.25, 1.0, 4.0] {
            let q = LaplaceRootsDiscrete::new(&spec, sv).expect("laplace roots");
            c.rel(format!("phi1 phi2 mu1 = lambda1 at s={sv}"), q.phi1 * q.phi2 * spec.mu1, spec.lambda1, 1e-10);
            c.rel(format!("psi1 psi2 mu2 = lambda2 at s={sv}"), q.psi1 * q.psi2 * spec.mu2, spec.lambda2, 1e-10);
            c.rel(
                format!("phi1 + phi2 at s={sv}"),
                q.phi1 + q.phi2,
                (spec.lambda1 + spec.mu1 + spec.eta1 + sv) / spec.mu1,
                1e-10,
            );
            c.rel(
                format!("psi1 + psi2 at s={sv}"),
                q.psi1 + q.psi2,
                (spec.lambda2 + spec.mu2 + sv) / spec.mu2,
                1e-10,
            );
        }
    }
    c
}

fn criterion_5() -> Criterion {
    let mut c = Criterion::new(5, "normalization");
    let gl = GaussLegendre::new(20);

    let sol = solve_steady(&base_queue()).expect("base steady state");
    let total: f64 = (0..20_000).map(|n| sol.marginal_pmf(n)).sum();
    c.abs("sum q_n", total, 1.0, 1e-10);

    let dsol = diffusion::solve_steady_density(&base_diffusion()).expect("base diffusion density");
    let mass = gl.over(|x| dsol.marginal_density(x), &cuts(600.0, 2.0));
    c.abs("integral of W", mass, 1.0, 1e-8);

    let settings = NumericSettings::default();
    let q = fpt_queue(1.0, 0.5, 1.0, 2.0, 0.5, 2);
    for t in [0.5, 2.0, 10.0] {
        let mut sum = 0.0;
        for n in 0..=80 {
            for env in Env::BOTH {
                sum += joint_transient(&q, n, env, t, &settings).unwrap_or(f64::NAN);
            }
        }
        c.abs(format!("sum p_n(t) at t={t}"), sum, 1.0, 1e-6);
    }

    let d = diffusion_fpt_spec(1.0, 2.0);
    let t = 1.0;
    let f = |x: f64| -> f64 {
        Env::BOTH
            .iter()
            .map(|&e| diffusion::transient_density(&d, x, e, t, &settings).unwrap_or(f64::NAN))
            .sum()
    };
    let mass = gl.over(f, &cuts(16.0, 1.0));
    c.abs("integral of f1 + f2 at t=1", mass, 1.0, 1e-5);

    for (drift, var, y, t) in [(-0.5, 1.0, 1.0, 1.0), (0.5, 4.0, 0.0, 2.0), (-1.0, 0.2, 3.0, 0.3)] {
        let k = WienerKernel::new(drift, var).expect("kernel");
        let reach = y + drift.abs() * t + 14.0 * (var * t).sqrt();
        let mass = gl.over(|x| k.reflected_density(x, t, y), &cuts(reach, reach / 40.0));
        c.abs(format!("reflected kernel mass drift={drift}, var={var}"), mass, 1.0, 1e-8);
    }

    let alive = gl.over(
        |x| {
            Env::BOTH
                .iter()
                .map(|&e| diffusion::absorbed_transient_density(&d, x, e, t, &settings).unwrap_or(f64::NAN))
                .sum()
        },
        &cuts(16.0, 1.0),
    );
    let dead = gl.over(|u| diffusion::fpt_density(&d, u, &settings).unwrap_or(f64::NAN), &cuts(t, t / 4.0));
    c.abs("absorbed mass balance at t=1", alive + dead, 1.0, 1e-5);
    c
}

/// Richardson-extrapolated one-sided derivative at 0 from f(0), f(h), f(2h), f(4h).
fn derivative_at_zero(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let (f0, f1, f2, f4) = (f(0.0), f(h), f(2.0 * h), f(4.0 * h));
    let d1 = (f1 - f0) / h;
    let d2 = (f2 - f0) / (2.0 * h);
    let d4 = (f4 - f0) / (4.0 * h);
    let r1 = 2.0 * d1 - d2;
    let r2 = 2.0 * d2 - d4;
    (4.0 * r1 - r2) / 3.0
}

fn criterion_6() -> Criterion {
    let mut c = Criterion::new(6, "transform and density consistency");
    let gl = GaussLegendre::new(20);
    let settings = tight();

    for j in [1, 3] {
        let spec = fpt_queue(1.0, 0.5, 2.0, 1.0, 0.5, j);
        let integral = gl.over(
            |t| fpt_discrete::fpt_density(&spec, t, &settings).unwrap_or(f64::NAN),
            &cuts(220.0, 4.0),
        );
        match fpt_discrete::fpt_laplace(&spec, 0.0) {
            Ok(b0) => c.abs(format!("B_{j}(0) vs integral of b_{j}"), b0, integral, 1e-5),
            Err(e) => c.flag(format!("B_{j}(0)"), false, e.to_string()),
        }
    }
    for j in [1, 3] {
        let spec = fpt_queue(1.0, 0.5, 1.0, 2.0, 0.1, j);
        let slope = derivative_at_zero(|s| fpt_discrete::fpt_laplace(&spec, s).unwrap_or(f64::NAN), 1e-5);
        match fpt_discrete::fpt_mean(&spec) {
            Ok(m) => c.rel(format!("E(T_{j}) vs -B'_{j}(0)"), m, -slope, 1e-5),
            Err(e) => c.flag(format!("E(T_{j})"), false, e.to_string()),
        }
    }

    let d = diffusion_fpt_spec(2.0, 1.0);
    let integral = gl.over(
        |t| diffusion::fpt_density(&d, t, &settings).unwrap_or(f64::NAN),
        &cuts(320.0, 4.0),
    );
    match diffusion::fpt_laplace(&d, 0.0) {
        Ok(k0) => c.abs("K(0) vs integral of k", k0, integral, 1e-4),
        Err(e) => c.flag("K(0)", false, e.to_string()),
    }
    let d = diffusion_fpt_spec(1.0, 2.0);
    let slope = derivative_at_zero(|s| diffusion::fpt_laplace(&d, s).unwrap_or(f64::NAN), 1e-5);
    match diffusion::fpt_mean(&d) {
        Ok(m) => c.rel("E(T_y) vs -K'(0)", m, -slope, 1e-6),
        Err(e) => c.flag("E(T_y)", false, e.to_string()),
    }
    c
}

fn sim(replications: u64, horizon: f64, burn_in: f64, offset: u64) -> SimConfig {
    SimConfig {
        replications,
        horizon,
        burn_in,
        seed: SEED + offset,
        worker_hint: 1,
    }
}

fn criterion_7() -> Criterion {
    let mut c = Criterion::new(7, "Monte Carlo oracle agreement");
    let settings = NumericSettings::default();

    let spec = base_queue();
    let sol = solve_steady(&spec).expect("base steady state");
    match simulator::estimate_steady_pmf(&spec, &sim(STEADY_PATHS, 1e5, 2e3, 1)) {
        Ok(pmf) => {
            for n in 0..=10 {
                for env in Env::BOTH {
                    c.within_se(format!("q_({n},{env})"), &pmf.get(n, env), sol.joint_pmf(n, env));
                }
            }
        }
        Err(e) => c.flag("steady simulation", false, e.to_string()),
    }

    let q = fpt_queue(1.0, 0.5, 1.0, 2.0, 0.5, 2);
    let t = 2.0;
    match simulator::estimate_transient_pmf(&q, t, &sim(TRANSIENT_REPS, t, 0.0, 2)) {
        Ok(pmf) => {
            for n in 0..=8 {
                for env in Env::BOTH {
                    let exact = joint_transient(&q, n, env, t, &settings).unwrap_or(f64::NAN);
                    c.within_se(format!("p_({n},{env})(2)"), &pmf.get(n, env), exact);
                }
            }
        }
        Err(e) => c.flag("transient simulation", false, e.to_string()),
    }

    for j in [1, 3] {
        let q = fpt_queue(1.0, 0.5, 1.2, 1.0, 0.2, j);
        let exact = fpt_discrete::absorption_probability(&q).unwrap_or(f64::NAN);
        match simulator::sample_first_emptying(&q, &sim(PASSAGE_REPS, 1e4, 0.0, 3 + j)) {
            Ok(s) => c.within_se(format!("P(T_{j}<inf)"), &s.completion, exact),
            Err(e) => c.flag(format!("P(T_{j}<inf) simulation"), false, e.to_string()),
        }
    }

    for j in [1, 3] {
        let q = fpt_queue(1.0, 0.5, 1.0, 2.0, 0.2, j);
        let exact = fpt_discrete::fpt_mean(&q).unwrap_or(f64::NAN);
        match simulator::sample_first_emptying(&q, &sim(PASSAGE_REPS, 1e4, 0.0, 10 + j)) {
            Ok(s) => {
                c.flag(format!("E(T_{j}) uncensored"), s.censored == 0, format!("{} censored", s.censored));
                c.within_se(format!("E(T_{j})"), &s.mean, exact);
            }
            Err(e) => c.flag(format!("E(T_{j}) simulation"), false, e.to_string()),
        }
    }

    let d = base_diffusion();
    let dsol = diffusion::solve_steady_density(&d).expect("base diffusion density");
    let edges = [0.0, 0.5, 1.5, 3.0, 6.0, 12.0, 24.0];
    let gl = GaussLegendre::new(20);
    match simulator::estimate_diffusion_stationary(&d, &sim(DIFFUSION_PATHS, 1e5, 2e3, 20), SDE_DT, &edges) {
        Ok(h) => {
            for (k, w) in edges.windows(2).enumerate() {
                let width = w[1] - w[0];
                for (env, est) in [(Some(Env::One), &h.env1[k]), (Some(Env::Two), &h.env2[k]), (None, &h.total[k])] {
                    let avg = gl.over(
                        |x| match env {
                            Some(e) => dsol.steady_density(x, e),
                            None => dsol.marginal_density(x),
                        },
                        &[w[0], w[1]],
                    ) / width;
                    let label = env.map_or("W".to_string(), |e| format!("W{e}"));
                    c.within_se(format!("{label} on [{}, {})", w[0], w[1]), est, avg);
                }
            }
        }
        Err(e) => c.flag("diffusion stationary simulation", false, e.to_string()),
    }

    let d = diffusion_fpt_spec(1.0, 2.0);
    let exact = diffusion::fpt_mean(&d).unwrap_or(f64::NAN);
    match simulator::estimate_diffusion_fpt(&d, &sim(SDE_FPT_REPS, 1e4, 0.0, 30), SDE_DT) {
        Ok(s) => {
            c.flag("E(T_y) uncensored", s.censored == 0, format!("{} censored", s.censored));
            c.within_se("E(T_y)", &s.mean, exact);
        }
        Err(e) => c.flag("diffusion FPT simulation", false, e.to_string()),
    }
    c
}

const STEADY_PATHS: u64 = 8;
const TRANSIENT_REPS: u64 = 1_000_000;
const PASSAGE_REPS: u64 = 1_000_000;
const DIFFUSION_PATHS: u64 = 2;
const SDE_FPT_REPS: u64 = 1_000_000;
const SDE_DT: f64 = 1e-3;

fn criterion_8() -> Criterion {
    let mut c = Criterion::new(8, "scaled queue approaches the diffusion");
    let spec = DiffusionSpec {
        lambda1s: 1.0,
        mu1s: 0.5,
        lambda2s: 0.8,
        mu2s: 1.2,
        omega1_sq: 0.2,
        omega2_sq: 0.4,
        eta1: 0.6,
        eta2: 0.4,
        init_position: 0.0,
        init_env_prob: 1.0,
    };
    let ns: Vec<u64> = (0..=15).map(|k| 20 * k).collect();
    match (diffusion::compare_scaled(&spec, 0.05, &ns), diffusion::compare_scaled(&spec, 0.01, &ns)) {
        (Ok(coarse), Ok(fine)) => {
            c.flag(
                "sup norm shrinks",
                fine.sup_norm < coarse.sup_norm,
                format!("eps=0.01: {:.3e}, eps=0.05: {:.3e}", fine.sup_norm, coarse.sup_norm),
            );
            for i in 0..2 {
                c.flag(
                    format!("sup norm shrinks in environment {}", i + 1),
                    fine.sup_norm_env[i] < coarse.sup_norm_env[i],
                    format!("{:.3e} vs {:.3e}", fine.sup_norm_env[i], coarse.sup_norm_env[i]),
                );
            }
        }
        (Err(e), _) | (_, Err(e)) => c.flag("comparison", false, e.to_string()),
    }
    c
}

fn criterion_9() -> Criterion {
    let mut c = Criterion::new(9, "monotone trends");
    type Stat = fn(&switchq::steady_state::SteadyStateSolution) -> [f64; 5];
    let stats: Stat = |s| {
        [
            s.conditional_mean(Env::One).unwrap_or(f64::NAN),
            s.conditional_mean(Env::Two).unwrap_or(f64::NAN),
            s.entropy_n_given_env(Env::One).unwrap_or(f64::NAN),
            s.entropy_n_given_env(Env::Two).unwrap_or(f64::NAN),
            s.entropy_n().unwrap_or(f64::NAN),
        ]
    };
    let names = ["E[N|E=1]", "E[N|E=2]", "H[N|E=1]", "H[N|E=2]", "H(N)"];
    let series = |specs: Vec<QueueSpec>| -> Vec<[f64; 5]> {
        specs
            .iter()
            .map(|s| solve_steady(s).map_or([f64::NAN; 5], |sol| stats(&sol)))
            .collect()
    };
    let eta2_grid = [0.02, 0.06, 0.1, 0.14, 0.18];
    let up = series(eta2_grid.iter().map(|&e2| with_eta(0.1, e2)).collect());
    let eta1_grid = [0.06, 0.1, 0.2, 0.4, 0.6];
    let down = series(eta1_grid.iter().map(|&e1| with_eta(e1, 0.1)).collect());
    for (k, name) in names.iter().enumerate() {
        let inc = up.windows(2).all(|w| w[1][k] > w[0][k]);
        c.flag(format!("{name} increasing in eta2"), inc, format!("{:?}", up.iter().map(|r| r[k]).collect::<Vec<_>>()));
        let dec = down.windows(2).all(|w| w[1][k] < w[0][k]);
        c.flag(format!("{name} decreasing in eta1"), dec, format!("{:?}", down.iter().map(|r| r[k]).collect::<Vec<_>>()));
    }

    for (l1, m1) in [(1.0, 0.5), (0.5, 1.0)] {
        for eta1 in [0.05, 0.2, 0.5, 1.0, 2.0] {
            let probs: Vec<f64> = [1, 3, 5, 10]
                .iter()
                .map(|&j| fpt_discrete::absorption_probability(&fpt_queue(l1, m1, 1.2, 1.0, eta1, j)).unwrap_or(f64::NAN))
                .collect();
            c.flag(
                format!("P(T_j<inf) decreasing in j (lambda1={l1}, mu1={m1}, eta1={eta1})"),
                probs.windows(2).all(|w| w[1] < w[0]),
                format!("{probs:?}"),
            );
        }
    }
    c
}

fn run_cli(args: &[&str], workers: &str) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_switchq"))
        .args(args)
        .env("SWITCHQ_WORKERS", workers)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

fn read_dir_sorted(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map(|rd| rd.filter_map(|e| e.ok()).map(|e| e.path()).collect())
        .unwrap_or_default();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let bytes = std::fs::read(&p).unwrap_or_default();
            (PathBuf::from(p.file_name().unwrap_or_default()), bytes)
        })
        .collect()
}

fn criterion_10() -> Criterion {
    let mut c = Criterion::new(10, "deterministic JSON output");
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let scratch = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => {
            c.flag("scratch directory", false, e.to_string());
            return c;
        }
    };
    for (command, file) in [
        ("steady", "steady.toml"),
        ("fpt", "fpt.toml"),
        ("diffusion", "diffusion_fpt.toml"),
        ("compare", "compare.toml"),
        ("simulate", "simulate.toml"),
    ] {
        let config = configs.join(file);
        let mut runs = Vec::new();
        for (k, workers) in ["1", "1", "3"].iter().enumerate() {
            let out = scratch.path().join(format!("{command}-{k}"));
            let args = [
                command,
                "--config",
                config.to_str().unwrap_or_default(),
                "--out",
                out.to_str().unwrap_or_default(),
                "--format",
                "json",
                "--seed",
                "17",
            ];
            match run_cli(&args, workers) {
                Ok(()) => runs.push(read_dir_sorted(&out)),
                Err(e) => c.flag(format!("{command} run {k}"), false, e),
            }
        }
        if runs.len() == 3 {
            c.flag(format!("{command} produced output"), !runs[0].is_empty(), "no files written");
            c.flag(format!("{command} repeat run identical"), runs[0] == runs[1], "outputs differ");
            c.flag(format!("{command} identical across worker counts"), runs[0] == runs[2], "outputs differ");
        }
    }
    c
}

fn main() {
    let criteria: [fn() -> Criterion; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    println!("acceptance suite");
    let mut all = true;
    for run in criteria {
        let start = Instant::now();
        let c = run();
        all &= c.report(start.elapsed().as_secs_f64());
    }
    if !all {
        println!("acceptance suite: FAILED");
        std::process::exit(1);
    }
    println!("acceptance suite: all criteria passed");
}
