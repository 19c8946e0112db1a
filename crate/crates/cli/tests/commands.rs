use std::path::{Path, PathBuf};
use std::process::Command;

use conclique::io::{read_samples_binary, read_samples_csv, TimingSidecar};
use conclique::{
    analytic_lattice_cover, build_lattice, run_cgs, ChainConfig, InitPolicy, LatticeKind, ModelSpec,
};
use conclique_cli::{
    cmd_benchmark, cmd_color, cmd_gof, cmd_simulate, monte_carlo_gof, CliError, EdgePair, Options,
};
use serde_json::{json, Value};
use tempfile::TempDir;

fn write_config(dir: &Path, name: &str, config: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(config).unwrap()).unwrap();
    path
}

fn lattice(rows: usize, cols: usize) -> Value {
    json!({"kind": "lattice", "rows": rows, "cols": cols, "neighborhood": "four"})
}

fn gaussian() -> Value {
    json!({"family": "gaussian", "alpha": 0.0, "eta": 0.2, "tau2": 1.0})
}

fn binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_conclique"))
        .args(args)
        .env_remove("CONCLIQUE_THREADS")
        .output()
        .unwrap()
}

fn report(out: Vec<u8>) -> String {
    String::from_utf8(out).unwrap()
}

#[test]
fn color_lattice_dsatur() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "run.json",
        &json!({"topology": lattice(20, 20), "cover": {"policy": "dsatur"}}),
    );
    let mut out = Vec::new();
    let summary = cmd_color(&Options::new(&cfg), &mut out).unwrap();
    assert_eq!(summary.q, 2);
    let text = report(out);
    assert!(text.contains("Q=2\n"), "{text}");
    assert!(text.contains("Delta_n="), "{text}");
    assert!(text.contains("coloring_seconds="), "{text}");
    let cover = conclique::io::read_cover_json(&summary.cover_path).unwrap();
    assert_eq!(cover.n(), 400);
}

#[test]
fn color_incidence_dsatur() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "run.json",
        &json!({"topology": {"kind": "incidence", "vertices": 6}, "cover": {"policy": "dsatur"}}),
    );
    let out = binary(&["color", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = report(out.stdout);
    assert!(text.contains("Q=5\n"), "{text}");
    assert!(text.contains("Delta_n=9\n"), "{text}");
}

#[test]
fn color_analytic_needs_structured_topology() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("g.txt"), "0 1\n1 2\n").unwrap();
    let cfg = write_config(
        dir.path(),
        "run.json",
        &json!({"topology": {"kind": "edge_list", "path": "g.txt"}, "cover": {"policy": "analytic"}}),
    );
    let err = cmd_color(&Options::new(&cfg), &mut Vec::new()).unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
}

#[test]
fn missing_topology_file_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "run.json",
        &json!({"topology": {"kind": "edge_list", "path": "absent.txt"}}),
    );
    let out = binary(&["color", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = report(out.stderr);
    assert!(stderr.contains("absent.txt"), "{stderr}");
}

#[test]
fn missing_config_exits_2() {
    let out = binary(&["simulate", "--config", "/nonexistent/run.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

fn simulate_config(dir: &Path, out: &str, extra: Value) -> PathBuf {
    let mut cfg = json!({
        "topology": lattice(5, 5),
        "model": gaussian(),
        "cover": {"policy": "analytic"},
        "chain": {"iterations": 100, "seed": 42},
        "output": {"dir": out},
    });
    if let (Value::Object(base), Value::Object(more)) = (&mut cfg, extra) {
        base.extend(more);
    }
    write_config(dir, &format!("{out}.json"), &cfg)
}

#[test]
fn simulate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = simulate_config(dir.path(), "a", json!({}));
    let b = simulate_config(dir.path(), "b", json!({}));
    let mut text = Vec::new();
    let sa = cmd_simulate(&Options::new(&a), &mut text).unwrap();
    let sb = cmd_simulate(&Options::new(&b), &mut Vec::new()).unwrap();
    assert!(report(text).contains("seed=42\n"));
    assert_eq!(sa.retained, 100);
    assert_eq!(
        std::fs::read(&sa.samples_path).unwrap(),
        std::fs::read(&sb.samples_path).unwrap()
    );

    let rows = read_samples_csv(std::fs::File::open(&sa.samples_path).unwrap()).unwrap();
    assert_eq!(rows.len(), 100);
    assert_eq!(rows[0].len(), 25);
    let header = std::fs::read_to_string(&sa.samples_path).unwrap();
    assert!(header.starts_with("site_0,site_1,"));

    let timing: TimingSidecar =
        serde_json::from_str(&std::fs::read_to_string(&sa.timing_path).unwrap()).unwrap();
    assert_eq!(
        (timing.q, timing.n, timing.m, timing.seed),
        (2, 25, 100, 42)
    );
    assert!(timing.seconds_total > 0.0 && timing.overhead_seconds > 0.0);
    let raw: Value =
        serde_json::from_str(&std::fs::read_to_string(&sa.timing_path).unwrap()).unwrap();
    for key in [
        "seconds_total",
        "seconds_per_iteration",
        "overhead_seconds",
        "Q",
        "n",
        "M",
        "seed",
    ] {
        assert!(raw.get(key).is_some(), "timing sidecar lacks {key}");
    }
}

#[test]
fn simulate_matches_library_chain() {
    let dir = TempDir::new().unwrap();
    let cfg = simulate_config(
        dir.path(),
        "lib",
        json!({"chain": {"iterations": 30, "burn_in": 10, "thinning": 4, "seed": 9}}),
    );
    let summary = cmd_simulate(&Options::new(&cfg), &mut Vec::new()).unwrap();
    let written = read_samples_csv(std::fs::File::open(&summary.samples_path).unwrap()).unwrap();

    let spec = ModelSpec::Gaussian {
        alpha: 0.0,
        eta: 0.2,
        tau2: 1.0,
    };
    let g = build_lattice(5, 5, LatticeKind::Four).unwrap();
    let cover = analytic_lattice_cover(5, 5, LatticeKind::Four).unwrap();
    let expected = run_cgs(
        &spec,
        &g,
        &cover,
        &ChainConfig::new(30, 9)
            .burn_in(10)
            .thinning(4)
            .init(InitPolicy::RandomFromMarginal),
    )
    .unwrap();
    assert_eq!(written.len(), 5);
    // CSV keeps shortest round-trip representations, so values are exact.
    assert_eq!(written, expected.samples);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = simulate_config(dir.path(), "s", json!({}));
    let mut opts = Options::new(&cfg);
    opts.seed = Some(7);
    let mut text = Vec::new();
    let summary = cmd_simulate(&opts, &mut text).unwrap();
    assert_eq!(summary.seed, 7);
    assert!(report(text).contains("seed=7\n"));
}

#[test]
fn binary_output_format() {
    let dir = TempDir::new().unwrap();
    let cfg = simulate_config(
        dir.path(),
        "bin",
        json!({"output": {"dir": "bin", "format": "binary", "samples": "samples.bin"}}),
    );
    let summary = cmd_simulate(&Options::new(&cfg), &mut Vec::new()).unwrap();
    let rows = read_samples_binary(std::fs::File::open(&summary.samples_path).unwrap()).unwrap();
    assert_eq!(rows.len(), 100);
    assert_eq!(rows[0].len(), 25);
}

#[test]
fn single_site_simulation() {
    let dir = TempDir::new().unwrap();
    let cfg = simulate_config(dir.path(), "ss", json!({"sampler": "single_site"}));
    let summary = cmd_simulate(&Options::new(&cfg), &mut Vec::new()).unwrap();
    assert_eq!(summary.timing.q, 25);
    assert_eq!(summary.retained, 100);
}

#[test]
fn output_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = simulate_config(dir.path(), "cfgdir", json!({}));
    let elsewhere = dir.path().join("elsewhere");
    let mut opts = Options::new(&cfg);
    opts.output = Some(elsewhere.clone());
    let summary = cmd_simulate(&opts, &mut Vec::new()).unwrap();
    assert!(summary.samples_path.starts_with(&elsewhere));
    assert!(!dir.path().join("cfgdir").exists());
}

#[test]
fn thread_count_does_not_change_samples() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "run.json",
        &json!({
            "topology": lattice(100, 100),
            "model": {"family": "autologistic_iso", "kappa": 0.4, "eta": 0.6},
            "cover": {"policy": "analytic"},
            "chain": {"iterations": 5, "seed": 3},
        }),
    );
    let mut outputs = Vec::new();
    for threads in [1, 4] {
        let mut opts = Options::new(&cfg);
        opts.threads = threads;
        opts.output = Some(dir.path().join(format!("t{threads}")));
        let s = cmd_simulate(&opts, &mut Vec::new()).unwrap();
        outputs.push(std::fs::read(s.samples_path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn threads_env_fallback() {
    let dir = TempDir::new().unwrap();
    let cfg = simulate_config(dir.path(), "env", json!({}));
    let out = Command::new(env!("CARGO_BIN_EXE_conclique"))
        .args(["simulate", "--config", cfg.to_str().unwrap()])
        .env("CONCLIQUE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_conclique"))
        .args(["simulate", "--config", cfg.to_str().unwrap()])
        .env("CONCLIQUE_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn regression_model_on_incidence_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "run.json",
        &json!({
            "topology": {"kind": "incidence", "vertices": 6},
            "model": {"family": "autologistic_regress", "beta0": -1.0, "beta1": 0.1,
                      "eta_u": 0.3, "eta_v": 0.3},
            "chain": {"iterations": 10},
        }),
    );
    let err = cmd_simulate(&Options::new(&cfg), &mut Vec::new()).unwrap_err();
    assert!(
        matches!(err, CliError::Core(conclique::Error::Incompatible(_))),
        "{err}"
    );
    let out = binary(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn anisotropic_model_on_edge_list_rejected() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("g.txt"), "# path\n0 1\n1 2\n").unwrap();
    let cfg = write_config(
        dir.path(),
        "run.json",
        &json!({
            "topology": {"kind": "edge_list", "path": "g.txt"},
            "model": {"family": "autologistic_aniso", "kappa": 0.5, "eta_u": 0.3, "eta_v": 0.3},
            "chain": {"iterations": 10},
        }),
    );
    let err = cmd_simulate(&Options::new(&cfg), &mut Vec::new()).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn zero_iterations_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = simulate_config(dir.path(), "zero", json!({"chain": {"iterations": 0}}));
    let err = cmd_simulate(&Options::new(&cfg), &mut Vec::new()).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let out = binary(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lsgm_from_csv_inputs() {
    let dir = TempDir::new().unwrap();
    let d = [
        [0.0, 1.0, 2.0, 5.0],
        [1.0, 0.0, 5.0, 2.0],
        [2.0, 5.0, 0.0, 1.0],
        [5.0, 2.0, 1.0, 0.0],
    ];
    let matrix: String = d
        .iter()
        .map(|r| r.map(|x| x.to_string()).join(",") + "\n")
        .collect();
    std::fs::write(dir.path().join("dist.csv"), matrix).unwrap();
    std::fs::write(
        dir.path().join("cov.csv"),
        "site_index,x1,x2,x3\n0,0.1,0,1\n1,0.2,1,0\n2,0.3,0,0\n3,0.4,1,1\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("w.csv"), "i,j,d\n0,3,1.25\n1,2,1.25\n").unwrap();
    let cfg = write_config(
        dir.path(),
        "run.json",
        &json!({
            "topology": {"kind": "threshold", "path": "dist.csv", "threshold": 5.0},
            "model": {"family": "lsgm", "beta": [0.094, -2.363, 0.015, 0.884], "eta": 0.3,
                      "covariates_file": "cov.csv", "weights_file": "w.csv"},
            "chain": {"iterations": 20},
        }),
    );
    let summary = cmd_simulate(&Options::new(&cfg), &mut Vec::new()).unwrap();
    assert_eq!(summary.timing.n, 4);
    assert_eq!(summary.timing.q, 2);
}

fn benchmark_config(
    dir: &Path,
    topology: Value,
    sizes: Value,
    iterations: Value,
    reps: usize,
) -> PathBuf {
    write_config(
        dir,
        "bench.json",
        &json!({
            "topology": topology,
            "model": {"family": "autologistic_iso", "kappa": 0.5, "eta": 0.4},
            "benchmark": {"sizes": sizes, "iterations": iterations, "replicates": reps},
        }),
    )
}

#[test]
fn benchmark_lattice_grid() {
    let dir = TempDir::new().unwrap();
    let cfg = benchmark_config(
        dir.path(),
        lattice(2, 2),
        json!([5, 10, 20]),
        json!([100, 1000]),
        3,
    );
    let mut text = Vec::new();
    let rows = cmd_benchmark(&Options::new(&cfg), &mut text).unwrap();
    assert_eq!(rows.len(), 36);
    assert!(report(text).contains("rows=36\n"));
    let csv = std::fs::read_to_string(dir.path().join("benchmark.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("sampler,n,M,replicate,seconds"));
    assert_eq!(lines.count(), 36);
    assert!(csv.contains("\ncgs,400,1000,3,"));
    assert!(csv.contains("\nsingle_site,25,100,1,"));
}

#[test]
fn benchmark_incidence_grid() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "bench.json",
        &json!({
            "topology": {"kind": "incidence", "vertices": 3},
            "model": {"family": "triad", "kappa": 0.3, "eta1": 0.2, "eta2": 0.2},
            "cover": {"policy": "analytic"},
            "benchmark": {"sizes": [10, 30], "iterations": [1000], "replicates": 1},
        }),
    );
    let rows = cmd_benchmark(&Options::new(&cfg), &mut Vec::new()).unwrap();
    assert_eq!(rows.len(), 4);
    let csv = std::fs::read_to_string(dir.path().join("benchmark.csv")).unwrap();
    assert!(csv.starts_with("sampler,V,M,replicate,seconds\n"));
    for v in [10, 30] {
        for s in ["cgs", "single_site"] {
            assert!(csv.contains(&format!("\n{s},{v},1000,1,")), "{csv}");
        }
    }
}

#[test]
fn empty_benchmark_grid_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = benchmark_config(dir.path(), lattice(2, 2), json!([]), json!([100]), 3);
    let out = binary(&["benchmark", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(report(out.stderr).contains("empty"));
}

fn binary_field(spec: &ModelSpec, rows: usize, seed: u64) -> Vec<f64> {
    let g = build_lattice(rows, rows, LatticeKind::Four).unwrap();
    let cover = analytic_lattice_cover(rows, rows, LatticeKind::Four).unwrap();
    let cfg = ChainConfig::new(300, seed)
        .burn_in(299)
        .init(InitPolicy::RandomFromMarginal);
    run_cgs(spec, &g, &cover, &cfg)
        .unwrap()
        .samples
        .pop()
        .unwrap()
        .into_inner()
}

#[test]
fn gof_calibration_under_the_null() {
    let spec = ModelSpec::AutologisticIso {
        kappa: 0.4,
        eta: 0.5,
    };
    let g = build_lattice(8, 8, LatticeKind::Four).unwrap();
    let cover = analytic_lattice_cover(8, 8, LatticeKind::Four).unwrap();
    let mut moderate = 0;
    for r in 0..100u64 {
        let observed = binary_field(&spec, 8, 10_000 + r);
        let chain = ChainConfig::new(1, r)
            .burn_in(200)
            .thinning(2)
            .init(InitPolicy::RandomFromMarginal);
        let s = monte_carlo_gof(&spec, &g, &cover, &EdgePair, &observed, 99, &chain).unwrap();
        assert_eq!(s.t_simulated.len(), 99);
        if (0.01..=0.99).contains(&s.p_value) {
            moderate += 1;
        }
    }
    assert!(
        moderate >= 90,
        "only {moderate}/100 p-values in [0.01, 0.99]"
    );
}

fn gof_setup(dir: &Path, observed: &[f64], model: Value, simulations: u64) -> PathBuf {
    let header: Vec<String> = (0..observed.len()).map(|i| format!("site_{i}")).collect();
    let row: Vec<String> = observed.iter().map(|v| v.to_string()).collect();
    std::fs::write(
        dir.join("observed.csv"),
        format!("{}\n{}\n", header.join(","), row.join(",")),
    )
    .unwrap();
    write_config(
        dir,
        "gof.json",
        &json!({
            "topology": lattice(10, 10),
            "model": model,
            "chain": {"burn_in": 100, "thinning": 1, "seed": 5},
            "gof": {"observed": "observed.csv", "statistic": "edge_pair", "simulations": simulations},
        }),
    )
}

#[test]
fn gof_extreme_observation_prints_resolution() {
    let dir = TempDir::new().unwrap();
    let cfg = gof_setup(
        dir.path(),
        &[1.0; 100],
        json!({"family": "autologistic_iso", "kappa": 0.2, "eta": 0.3}),
        50,
    );
    let mut text = Vec::new();
    let summary = cmd_gof(&Options::new(&cfg), &mut text).unwrap();
    assert_eq!(summary.t_observed, 1.0);
    assert_eq!(summary.p_value, 0.0);
    assert!(
        report(text).contains("p_M=0.0000 (< 1/M resolution)\n"),
        "p-value line missing"
    );
}

#[test]
fn gof_zero_simulations_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = gof_setup(
        dir.path(),
        &[0.0; 100],
        json!({"family": "autologistic_iso", "kappa": 0.2, "eta": 0.3}),
        0,
    );
    let out = binary(&["gof", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gof_statistic_must_fit_data_type() {
    let dir = TempDir::new().unwrap();
    let cfg = gof_setup(dir.path(), &[0.5; 100], gaussian(), 10);
    let err = cmd_gof(&Options::new(&cfg), &mut Vec::new()).unwrap_err();
    assert!(matches!(err, CliError::Config(_)), "{err}");

    let cfg = gof_setup(
        dir.path(),
        &[0.5; 100],
        json!({"family": "autologistic_iso", "kappa": 0.2, "eta": 0.3}),
        10,
    );
    let err = cmd_gof(&Options::new(&cfg), &mut Vec::new()).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn gof_observed_size_must_match() {
    let dir = TempDir::new().unwrap();
    let cfg = gof_setup(
        dir.path(),
        &[0.0; 99],
        json!({"family": "autologistic_iso", "kappa": 0.2, "eta": 0.3}),
        10,
    );
    let err = cmd_gof(&Options::new(&cfg), &mut Vec::new()).unwrap_err();
    assert!(matches!(
        err,
        CliError::Core(conclique::Error::LengthMismatch { .. })
    ));
}

#[test]
fn cgs_samples_faster_than_single_site() {
    let dir = TempDir::new().unwrap();
    let mut best = [f64::INFINITY; 2];
    for _ in 0..3 {
        for (k, sampler) in ["cgs", "single_site"].into_iter().enumerate() {
            let cfg = write_config(
                dir.path(),
                &format!("{sampler}.json"),
                &json!({
                    "topology": lattice(50, 50),
                    "model": gaussian(),
                    "cover": {"policy": "analytic"},
                    "sampler": sampler,
                    "chain": {"iterations": 1000, "seed": 1},
                    "output": {"dir": sampler},
                }),
            );
            let s = cmd_simulate(&Options::new(&cfg), &mut Vec::new()).unwrap();
            best[k] = best[k].min(s.timing.seconds_total);
        }
    }
    assert!(
        best[0] < best[1],
        "cgs {:.4}s vs single-site {:.4}s",
        best[0],
        best[1]
    );
}
