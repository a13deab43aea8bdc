use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use switchq::steady_state::solve_steady;
use switchq::Env;
use switchq_cli::RunConfig;

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn config(name: &str) -> PathBuf {
    manifest().join("configs").join(name)
}

fn switchq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_switchq"))
        .args(args)
        .env_remove("SWITCHQ_WORKERS")
        .output()
        .expect("binary runs")
}

fn run_ok(command: &str, cfg: &Path, out: &Path, extra: &[&str]) {
    let mut args = vec![command, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = switchq(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (header, rows) = read_csv(path);
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

fn same_cell(a: &str, b: &str) -> bool {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1e-300),
        _ => a == b,
    }
}

#[test]
fn golden_outputs_match() {
    let golden = manifest().join("tests").join("golden");
    for (command, files) in [
        ("steady", vec!["steady.csv", "steady_summary.csv"]),
        ("fpt", vec!["fpt_density.csv", "fpt_transform.csv", "fpt_summary.csv"]),
        ("diffusion", vec!["diffusion_steady.csv", "diffusion_summary.csv"]),
    ] {
        let out = tempfile::tempdir().unwrap();
        run_ok(command, &golden.join(format!("{command}.toml")), out.path(), &[]);
        for file in files {
            let (h_got, rows_got) = read_csv(&out.path().join(file));
            let (h_want, rows_want) = read_csv(&golden.join(command).join(file));
            assert_eq!(h_got, h_want, "{command}/{file} header");
            assert_eq!(rows_got.len(), rows_want.len(), "{command}/{file} rows");
            for (g, w) in rows_got.iter().zip(&rows_want) {
                assert!(g.iter().zip(w).all(|(a, b)| same_cell(a, b)), "{command}/{file}: {g:?} vs {w:?}");
            }
        }
    }
}

#[test]
fn steady_probabilities_sum_to_one() {
    let out = tempfile::tempdir().unwrap();
    run_ok("steady", &config("steady.toml"), out.path(), &[]);
    let q = column(&out.path().join("steady.csv"), "q_n");
    assert_eq!(q.len(), 401);
    let total: f64 = q.iter().sum();
    assert!((total - 1.0).abs() < 1e-8, "{total}");
}

#[test]
fn compare_improves_with_smaller_epsilon() {
    let out = tempfile::tempdir().unwrap();
    run_ok("compare", &config("compare.toml"), out.path(), &[]);
    for k in 0..2 {
        let (header, rows) = read_csv(&out.path().join(format!("compare_{k}.csv")));
        assert_eq!(header, ["epsilon", "n", "q_n", "eps_W", "q_n1", "eps_W1", "q_n2", "eps_W2"]);
        assert_eq!(rows.len(), 16);
    }
    let path = out.path().join("compare_summary.csv");
    let eps = column(&path, "epsilon");
    let sup = column(&path, "sup_norm");
    assert_eq!(eps, [0.01, 0.05]);
    assert!(sup[0] < sup[1], "{sup:?}");
}

#[test]
fn undefined_mean_exits_with_regime_code() {
    let out = tempfile::tempdir().unwrap();
    let cfg = config("fpt_transient_queue.toml");
    let o = switchq(&["fpt", "--config", cfg.to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("FPT mean undefined: λ₂ ≥ μ₂"), "{err}");
    assert_eq!(fs::read_dir(out.path()).unwrap().count(), 0);
}

#[test]
fn unsupported_regime_exits_with_regime_code() {
    let out = tempfile::tempdir().unwrap();
    let cfg = out.path().join("bad.toml");
    let text = fs::read_to_string(config("transient.toml")).unwrap().replace("eta2 = 0.0", "eta2 = 0.3");
    fs::write(&cfg, text).unwrap();
    let o = switchq(&["transient", "--config", cfg.to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn validation_failures_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("mu1 = 0.5", "mu1 = -0.5", "μ₁ must be finite and > 0"),
        ("n_max = 400", "n_max = 400\nextra = 1", "extra"),
        ("eta2 = 0.08", "eta2 = 0.08\ninit_env_prob = 1.5", "initial environment probability"),
    ];
    for (from, to, needle) in cases {
        let cfg = dir.path().join("bad.toml");
        fs::write(&cfg, fs::read_to_string(config("steady.toml")).unwrap().replace(from, to)).unwrap();
        let o = switchq(&["steady", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1));
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(needle), "{err}");
    }
    let o = switchq(&["steady", "--config", "/nonexistent/switchq.toml"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_round_trips_library_values() {
    let out = tempfile::tempdir().unwrap();
    run_ok("steady", &config("steady.toml"), out.path(), &["--format", "json"]);
    let doc: Value = serde_json::from_str(&fs::read_to_string(out.path().join("steady.json")).unwrap()).unwrap();
    let cols: Vec<&str> = doc["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(cols, ["n", "q_n1", "q_n2", "q_n", "H_E_given_n"]);
    let spec = RunConfig::load(&config("steady.toml")).unwrap().queue().unwrap();
    let sol = solve_steady(&spec).unwrap();
    for row in doc["rows"].as_array().unwrap() {
        let n = row[0].as_u64().unwrap();
        let exact = [
            sol.joint_pmf(n, Env::One),
            sol.joint_pmf(n, Env::Two),
            sol.marginal_pmf(n),
            sol.entropy_env_given_n(n),
        ];
        for (k, want) in exact.iter().enumerate() {
            let got = row[k + 1].as_f64().unwrap();
            assert_eq!(got.to_bits(), want.to_bits(), "n = {n}, column {}", cols[k + 1]);
        }
    }
}

#[test]
fn simulate_is_reproducible_and_seed_sensitive() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let cfg = config("simulate.toml");
    run_ok("simulate", &cfg, a.path(), &["--seed", "5"]);
    run_ok("simulate", &cfg, b.path(), &["--seed", "5"]);
    run_ok("simulate", &cfg, c.path(), &["--seed", "6"]);
    let read = |d: &Path| fs::read(d.join("sim_steady.json")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_ne!(read(a.path()), read(c.path()));
    let summary = fs::read_to_string(a.path().join("sim_summary.json")).unwrap();
    assert!(summary.contains("[\"seed\",5]"), "{summary}");
}

#[test]
fn worker_override_is_validated() {
    let out = tempfile::tempdir().unwrap();
    let cfg = config("simulate.toml");
    let o = Command::new(env!("CARGO_BIN_EXE_switchq"))
        .args(["simulate", "--config", cfg.to_str().unwrap(), "--out", out.path().to_str().unwrap()])
        .env("SWITCHQ_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("SWITCHQ_WORKERS"));
}

#[test]
fn every_example_config_parses() {
    for entry in fs::read_dir(manifest().join("configs")).unwrap() {
        let path = entry.unwrap().path();
        let cfg = RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let command = cfg.command.expect("example configs name their command");
        cfg.validate_for(command).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn transient_table_layout() {
    let out = tempfile::tempdir().unwrap();
    run_ok("transient", &config("transient.toml"), out.path(), &[]);
    let path = out.path().join("transient.csv");
    let (header, rows) = read_csv(&path);
    assert_eq!(header, ["t", "n", "p_n1", "p_n2"]);
    assert_eq!(rows.len(), 3 * 21);
    let p1 = column(&path, "p_n1");
    assert!(p1.iter().all(|&p| (0.0..=1.0).contains(&p)));
}
