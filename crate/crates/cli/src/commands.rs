//! Command implementations. Each returns the tables it would write.

use switchq::diffusion::{self, compare_scaled, solve_steady_density};
use switchq::fpt_discrete;
use switchq::simulator::{
    self, DiffusionHistogram, EmpiricalEstimate, EmpiricalPmf, FirstPassageSample,
};
use switchq::steady_state::solve_steady_with;
use switchq::transient::{joint_transient_grid, TransientPoint};
use switchq::{Env, Error, QueueSpec};

use crate::config::{Command, RunConfig, SimTarget};
use crate::output::{Cell, Table};
use crate::CliError;

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Vec<Table>, CliError> {
    cfg.validate_for(command)?;
    match command {
        Command::Steady => steady(cfg),
        Command::Transient => transient(cfg),
        Command::Fpt => fpt(cfg),
        Command::Diffusion => diffusion_tables(cfg),
        Command::Simulate => simulate(cfg),
        Command::Compare => compare(cfg),
    }
}

fn num(v: f64) -> Cell {
    Cell::Num(v)
}

fn scalar(name: &str, v: impl Into<Cell>) -> (String, Cell) {
    (name.to_string(), v.into())
}

// Quantities that are undefined in a degenerate regime print as NaN.
fn or_nan(r: switchq::Result<f64>) -> Result<f64, CliError> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::Domain(_)) => Ok(f64::NAN),
        Err(e) => Err(e.into()),
    }
}

fn steady(cfg: &RunConfig) -> Result<Vec<Table>, CliError> {
    let spec = cfg.queue()?;
    let sol = solve_steady_with(&spec, &cfg.numerics.series)?;
    let mut table = Table::new("steady", &["n", "q_n1", "q_n2", "q_n", "H_E_given_n"]);
    for n in cfg.grids.levels() {
        table.push(vec![
            n.into(),
            num(sol.joint_pmf(n, Env::One)),
            num(sol.joint_pmf(n, Env::Two)),
            num(sol.marginal_pmf(n)),
            num(sol.entropy_env_given_n(n)),
        ]);
    }
    let summary = Table::scalars(
        "steady_summary",
        vec![
            scalar("case", format!("{:?}", sol.case)),
            scalar("P(E=1)", sol.env_prob(Env::One)),
            scalar("P(E=2)", sol.env_prob(Env::Two)),
            scalar("E[N|E=1]", or_nan(sol.conditional_mean(Env::One))?),
            scalar("E[N|E=2]", or_nan(sol.conditional_mean(Env::Two))?),
            scalar("E[N]", sol.mean()),
            scalar("H[N|E=1]", or_nan(sol.entropy_n_given_env(Env::One))?),
            scalar("H[N|E=2]", or_nan(sol.entropy_n_given_env(Env::Two))?),
            scalar("H(N)", sol.entropy_n()?),
            scalar("H(E)", sol.entropy_env()),
            scalar("H_inf", sol.entropy_env_limit()),
        ],
    );
    Ok(vec![table, summary])
}

/// Evaluates on the η₂ = 0 formulas, relabelling environments when η₁ = 0.
fn transient_points(spec: &QueueSpec, ns: &[u64], ts: &[f64], cfg: &RunConfig) -> Result<Vec<TransientPoint>, CliError> {
    if spec.eta2 != 0.0 && spec.eta1 == 0.0 {
        let pts = joint_transient_grid(&spec.swap_environments(), ns, ts, &cfg.numerics)?;
        return Ok(pts
            .into_iter()
            .map(|p| TransientPoint {
                p1: p.p2,
                p2: p.p1,
                ..p
            })
            .collect());
    }
    Ok(joint_transient_grid(spec, ns, ts, &cfg.numerics)?)
}

fn transient(cfg: &RunConfig) -> Result<Vec<Table>, CliError> {
    let spec = cfg.queue()?;
    let pts = transient_points(&spec, &cfg.grids.levels(), &cfg.grids.t, cfg)?;
    let mut table = Table::new("transient", &["t", "n", "p_n1", "p_n2"]);
    for p in pts {
        table.push(vec![num(p.t), p.n.into(), num(p.p1), num(p.p2)]);
    }
    Ok(vec![table])
}

fn fpt(cfg: &RunConfig) -> Result<Vec<Table>, CliError> {
    let spec = cfg.queue()?;
    let mut density = Table::new("fpt_density", &["t", "b_j"]);
    for &t in &cfg.grids.t {
        density.push(vec![num(t), num(fpt_discrete::fpt_density(&spec, t, &cfg.numerics)?)]);
    }
    let mut transform = Table::new("fpt_transform", &["s", "B_j"]);
    for &s in &cfg.grids.s {
        transform.push(vec![num(s), num(fpt_discrete::fpt_laplace(&spec, s)?)]);
    }
    let mut items = vec![
        scalar("j", spec.init_state),
        scalar("P(T_j<inf)", fpt_discrete::absorption_probability(&spec)?),
    ];
    if cfg.options.fpt_mean {
        items.push(scalar("E(T_j)", fpt_discrete::fpt_mean(&spec)?));
    }
    Ok(vec![density, transform, Table::scalars("fpt_summary", items)])
}

fn diffusion_tables(cfg: &RunConfig) -> Result<Vec<Table>, CliError> {
    let spec = cfg.diffusion()?;
    let g = &cfg.grids;
    let mut tables = Vec::new();
    let mut items = Vec::new();
    if !g.x.is_empty() {
        let sol = solve_steady_density(&spec)?;
        let mut table = Table::new("diffusion_steady", &["x", "W1", "W2", "W"]);
        for &x in &g.x {
            let (w1, w2) = (sol.steady_density(x, Env::One), sol.steady_density(x, Env::Two));
            table.push(vec![num(x), num(w1), num(w2), num(sol.marginal_density(x))]);
        }
        tables.push(table);
        items.extend([
            scalar("case", format!("{:?}", sol.case)),
            scalar("P(E=1)", sol.env_prob(Env::One)),
            scalar("P(E=2)", sol.env_prob(Env::Two)),
            scalar("E[X|E=1]", or_nan(sol.conditional_mean(Env::One))?),
            scalar("E[X|E=2]", or_nan(sol.conditional_mean(Env::Two))?),
            scalar("E[X]", sol.mean()),
        ]);
    }
    if !g.t.is_empty() || !g.s.is_empty() {
        if !g.t.is_empty() {
            let ks = diffusion::fpt_density_grid(&spec, &g.t, &cfg.numerics)?;
            let mut table = Table::new("diffusion_fpt_density", &["t", "k"]);
            for (&t, k) in g.t.iter().zip(ks) {
                table.push(vec![num(t), num(k)]);
            }
            tables.push(table);
        }
        if !g.s.is_empty() {
            let mut table = Table::new("diffusion_fpt_transform", &["s", "K"]);
            for &s in &g.s {
                table.push(vec![num(s), num(diffusion::fpt_laplace(&spec, s)?)]);
            }
            tables.push(table);
        }
        items.push(scalar("y", spec.init_position));
        items.push(scalar("P(T_y<inf)", diffusion::absorption_probability(&spec)?));
        if cfg.options.fpt_mean {
            items.push(scalar("E(T_y)", diffusion::fpt_mean(&spec)?));
        }
    }
    tables.push(Table::scalars("diffusion_summary", items));
    Ok(tables)
}

fn compare(cfg: &RunConfig) -> Result<Vec<Table>, CliError> {
    let spec = cfg.diffusion()?;
    let ns = cfg.grids.levels();
    let mut tables = Vec::new();
    let mut summary = Table::new("compare_summary", &["epsilon", "sup_norm", "sup_norm_env1", "sup_norm_env2"]);
    for (k, &eps) in cfg.grids.epsilon.iter().enumerate() {
        let c = compare_scaled(&spec, eps, &ns)?;
        let mut table = Table::new(
            format!("compare_{k}"),
            &["epsilon", "n", "q_n", "eps_W", "q_n1", "eps_W1", "q_n2", "eps_W2"],
        );
        for r in &c.rows {
            table.push(vec![num(eps), r.n.into(), num(r.q), num(r.w), num(r.q1), num(r.w1), num(r.q2), num(r.w2)]);
        }
        tables.push(table);
        summary.push(vec![num(eps), num(c.sup_norm), num(c.sup_norm_env[0]), num(c.sup_norm_env[1])]);
    }
    tables.push(summary);
    Ok(tables)
}

fn simulate(cfg: &RunConfig) -> Result<Vec<Table>, CliError> {
    let sim = cfg.sim()?;
    let dt = cfg.options.sim_dt;
    let g = &cfg.grids;
    let mut meta = vec![
        scalar("seed", sim.seed),
        scalar("replications", sim.replications),
        scalar("horizon", sim.horizon),
        scalar("burn_in", sim.burn_in),
    ];
    let mut tables = Vec::new();
    let warnings: Vec<String> = match cfg.target()? {
        SimTarget::Steady => {
            let pmf = simulator::estimate_steady_pmf(&cfg.queue()?, &sim)?;
            tables.push(pmf_table("sim_steady", &pmf, None, &level_grid(cfg, &pmf)));
            pmf.warnings
        }
        SimTarget::Transient => {
            let spec = cfg.queue()?;
            let mut table = pmf_table_header("sim_transient", true);
            let mut warnings = Vec::new();
            for &t in &g.t {
                let pmf = simulator::estimate_transient_pmf(&spec, t, &sim)?;
                append_pmf(&mut table, &pmf, Some(t), &level_grid(cfg, &pmf));
                warnings.extend(pmf.warnings);
            }
            tables.push(table);
            warnings
        }
        SimTarget::Fpt => {
            let sample = simulator::sample_first_emptying(&cfg.queue()?, &sim)?;
            meta.extend(passage_items(&sample));
            Vec::new()
        }
        SimTarget::DiffusionFpt => {
            let sample = simulator::estimate_diffusion_fpt(&cfg.diffusion()?, &sim, dt)?;
            meta.push(scalar("dt", dt));
            meta.extend(passage_items(&sample));
            Vec::new()
        }
        SimTarget::DiffusionStationary => {
            let h = simulator::estimate_diffusion_stationary(&cfg.diffusion()?, &sim, dt, &g.x)?;
            meta.push(scalar("dt", dt));
            let mut table = histogram_header("sim_diffusion_stationary", false);
            append_histogram(&mut table, &h, None);
            tables.push(table);
            h.warnings
        }
        SimTarget::DiffusionTransient => {
            let spec = cfg.diffusion()?;
            meta.push(scalar("dt", dt));
            let mut table = histogram_header("sim_diffusion_transient", true);
            let mut warnings = Vec::new();
            for &t in &g.t {
                let h = simulator::estimate_diffusion_transient(&spec, t, dt, &g.x, &sim)?;
                append_histogram(&mut table, &h, Some(t));
                warnings.extend(h.warnings);
            }
            tables.push(table);
            warnings
        }
    };
    for w in &warnings {
        log::warn!("{w}");
        meta.push(scalar("warning", w.as_str()));
    }
    tables.push(Table::scalars("sim_summary", meta));
    Ok(tables)
}

fn level_grid(cfg: &RunConfig, pmf: &EmpiricalPmf) -> Vec<u64> {
    let levels = cfg.grids.levels();
    if levels.is_empty() {
        (0..=pmf.max_level()).collect()
    } else {
        levels
    }
}

fn pmf_table_header(name: &str, with_t: bool) -> Table {
    let cols = ["n", "q_n1", "se_n1", "q_n2", "se_n2"];
    if with_t {
        let mut c = vec!["t"];
        c.extend(cols);
        Table::new(name, &c)
    } else {
        Table::new(name, &cols)
    }
}

fn pmf_table(name: &str, pmf: &EmpiricalPmf, t: Option<f64>, levels: &[u64]) -> Table {
    let mut table = pmf_table_header(name, t.is_some());
    append_pmf(&mut table, pmf, t, levels);
    table
}

fn append_pmf(table: &mut Table, pmf: &EmpiricalPmf, t: Option<f64>, levels: &[u64]) {
    for &n in levels {
        let (a, b) = (pmf.get(n, Env::One), pmf.get(n, Env::Two));
        let mut row: Vec<Cell> = t.map(num).into_iter().collect();
        row.extend([n.into(), num(a.value), num(a.std_error), num(b.value), num(b.std_error)]);
        table.push(row);
    }
}

fn histogram_header(name: &str, with_t: bool) -> Table {
    let cols = ["x_lo", "x_hi", "W1", "se_W1", "W2", "se_W2", "W", "se_W"];
    if with_t {
        let mut c = vec!["t"];
        c.extend(cols);
        Table::new(name, &c)
    } else {
        Table::new(name, &cols)
    }
}

fn append_histogram(table: &mut Table, h: &DiffusionHistogram, t: Option<f64>) {
    for (k, w) in h.edges.windows(2).enumerate() {
        let mut row: Vec<Cell> = t.map(num).into_iter().collect();
        row.extend([num(w[0]), num(w[1])]);
        for e in [&h.env1[k], &h.env2[k], &h.total[k]] {
            row.extend([num(e.value), num(e.std_error)]);
        }
        table.push(row);
    }
}

fn passage_items(s: &FirstPassageSample) -> Vec<(String, Cell)> {
    let est = |name: &str, e: &EmpiricalEstimate| {
        vec![scalar(name, e.value), scalar(&format!("se_{name}"), e.std_error)]
    };
    let mut items = vec![scalar("censored", s.censored)];
    items.extend(est("completion", &s.completion));
    items.extend(est("mean_uncensored", &s.mean));
    items
}

