use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hetssd::bayes_factor::{bf01_from_data, AnalysisPriorSample};
use hetssd::distributions::PriorSpec;
use hetssd::io::{load_log_bf_sample, read_rows, SensitivityRow, SsdRow};
use hetssd::model::EffectSizeVector;
use hetssd::predictive::RunStreams;
use hetssd_cli::commands::AnalyzeReport;
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hetssd"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ssd_rows(path: &Path) -> Vec<SsdRow> {
    read_rows(std::fs::File::open(path).unwrap()).unwrap()
}

#[test]
fn table2_column1_reproduced() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("t2.csv");
    let cfg = config("table2_col1.json");
    let o = run(&["ssd", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let published = [
        (518, 0.220), (268, 0.214), (184, 0.215), (143, 0.215), (117, 0.213),
        (100, 0.215), (88, 0.212), (79, 0.214), (72, 0.213), (67, 0.210),
        (62, 0.213), (58, 0.215), (55, 0.215), (52, 0.217), (49, 0.217),
    ];
    let rows = ssd_rows(&out);
    assert_eq!(rows.len(), 15);
    for (row, (n, inv_k1)) in rows.iter().zip(published) {
        let rel = (row.n_star as f64 / n as f64 - 1.0).abs();
        assert!(rel <= 0.10, "m={} n*={} vs {n}", row.m, row.n_star);
        assert!((row.inv_k1 - inv_k1).abs() <= 0.02, "m={} 1/k1={} vs {inv_k1}", row.m, row.inv_k1);
        assert_eq!(row.k0, None);
    }
    // per-m progress goes to stderr
    assert_eq!(stderr(&o).lines().filter(|l| l.contains("n*=")).count(), 15);

    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("t2.meta.json")).unwrap()).unwrap();
    for key in ["seed", "S", "T", "priors", "wall_time_ms", "version"] {
        assert!(meta.get(key).is_some(), "sidecar lacks {key}");
    }
    assert_eq!(meta["S"], 10000);
}

#[test]
fn override_changes_target() {
    let dir = TempDir::new().unwrap();
    let cfg = config("table2_col1.json");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = ["ssd", "--config", cfg.to_str().unwrap(), "--m", "8", "--override", "s=2000", "--override", "t_count=5000"];
    let o = run(&[&base[..], &["--out", a.to_str().unwrap()]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(&[&base[..], &["--override", "target.alpha=0.05", "--out", b.to_str().unwrap()]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    let (ra, rb) = (&ssd_rows(&a)[0], &ssd_rows(&b)[0]);
    assert!(rb.n_star < ra.n_star);
    assert!(rb.inv_k1 > ra.inv_k1);
    assert!((rb.p0_m - 0.05).abs() < 1e-3);
}

#[test]
fn missing_design_prior_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(config("table2_col1.json")).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("design_prior");
    let path = dir.path().join("bad.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let o = run(&["ssd", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("design_prior"), "{}", stderr(&o));
}

#[test]
fn malformed_config_reports_position() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"s\": 100,\n  \"t_count\": ,\n}\n").unwrap();
    let o = run(&["ssd", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    std::fs::write(&path, r#"{"target": {"mode": "conditional", "alpha": "x", "power": 0.8}}"#).unwrap();
    let o = run(&["ssd", "--paper-defaults", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("target.alpha"), "{}", stderr(&o));
}

#[test]
fn invalid_values_are_config_errors() {
    for args in [
        &["ssd", "--override", "s=50"][..],
        &["ssd", "--m", "2..4"],
        &["ssd", "--override", "target.alpha=0.7"],
        &["ssd", "--override", "bogus=1"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn missing_file_is_io_error() {
    let o = run(&["ssd", "--config", "/nonexistent/run.json"]);
    assert_eq!(o.status.code(), Some(3));
    let reduced = config("reduced.json");
    let o = run(&["ssd", "--paper-defaults", "--config", reduced.to_str().unwrap(), "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn infeasible_target_exit_code() {
    let reduced = config("reduced.json");
    let o = run(&[
        "ssd", "--paper-defaults", "--config", reduced.to_str().unwrap(),
        "--override", "search.n_max=20",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("infeasible"), "{}", stderr(&o));
}

#[test]
fn cost_selection_reported() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c.json");
    let o = run(&[
        "ssd", "--override", "s=2000", "--override", "t_count=5000", "--m", "6..9",
        "--override", "cost={\"c1\": 1, \"c2\": 0}", "--format", "json", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let best = rows
        .iter()
        .min_by_key(|r| r["m"].as_u64().unwrap() * r["n_star"].as_u64().unwrap())
        .unwrap();
    assert_eq!(v["cost_selection"]["m"], best["m"]);
    assert_eq!(v["cost_selection"]["total_cost"].as_f64().unwrap(), (best["m"].as_u64().unwrap() * best["n_star"].as_u64().unwrap()) as f64);
    assert!(String::from_utf8_lossy(&o.stdout).contains("lowest cost"));
}

#[test]
fn predictive_default_run() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("pred");
    let o = run(&["predictive", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["m0.csv", "m1.csv"] {
        let text = std::fs::read_to_string(out.join(f)).unwrap();
        assert_eq!(text.lines().count(), 50_001, "{f}");
        let sample = load_log_bf_sample(&out.join(f)).unwrap();
        assert_eq!(sample.len(), 50_000);
        assert_eq!(sample.design().n, 80);
    }
    assert!(out.join("m0.meta.json").exists() && out.join("m1.meta.json").exists());
    let s: Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let p = s["p_below_inv_k1_m1"].as_f64().unwrap();
    assert!((p - 0.78).abs() <= 0.02, "P(BF01 < 1/3 | M1) = {p}");
    assert_eq!(s["T"], 50000);
}

#[test]
fn predictive_is_byte_reproducible() {
    let dir = TempDir::new().unwrap();
    let reduced = config("reduced.json");
    let mut files = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = run(&[
            "predictive", "--paper-defaults", "--config", reduced.to_str().unwrap(),
            "--seed", "9", "--n", "40", "--m", "5", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        files.push((std::fs::read(out.join("m0.csv")).unwrap(), std::fs::read(out.join("m1.csv")).unwrap()));
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(String::from_utf8_lossy(&files[0].0).lines().count(), 5001);
}

#[test]
fn ssd_rerun_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let reduced = config("reduced.json");
    let mut bodies = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let o = run(&["ssd", "--paper-defaults", "--config", reduced.to_str().unwrap(), "--m", "4,8", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        bodies.push(std::fs::read(out).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn sensitivity_singleton_matches_ssd() {
    let dir = TempDir::new().unwrap();
    let reduced = config("reduced.json");
    let sens = dir.path().join("sens.csv");
    let ssd = dir.path().join("ssd.csv");
    let common = ["--paper-defaults", "--config", reduced.to_str().unwrap()];
    let o = run(&[&["sensitivity"][..], &common, &["--mu-gamma", "0.2", "--out", sens.to_str().unwrap()]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(&[&["ssd"][..], &common, &["--out", ssd.to_str().unwrap()]].concat());
    assert!(o.status.success(), "{}", stderr(&o));

    let s: Vec<SensitivityRow> = read_rows(std::fs::File::open(&sens).unwrap()).unwrap();
    let d = ssd_rows(&ssd);
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].mu_gamma, 0.2);
    assert_eq!((s[0].n_star, s[0].inv_k1, s[0].p1_c), (d[0].n_star, d[0].inv_k1, d[0].p1_c));
    let header = std::fs::read_to_string(&sens).unwrap();
    assert!(header.starts_with("mu_gamma,m,n_star"));
}

#[test]
fn sensitivity_direction() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sens.csv");
    let o = run(&["sensitivity", "--m", "8", "--mu-gamma", "0.1,0.2,0.3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows: Vec<SensitivityRow> = read_rows(std::fs::File::open(&out).unwrap()).unwrap();
    let ns: Vec<u64> = rows.iter().map(|r| r.n_star).collect();
    for (n, published) in ns.iter().zip([445.0, 100.0, 44.0]) {
        assert!((*n as f64 / published - 1.0).abs() <= 0.10, "{ns:?}");
    }
    assert_eq!(o.status.code(), Some(0));
    let bad = run(&["sensitivity", "--m", "8", "--mu-gamma", "-0.1"]);
    assert_eq!(bad.status.code(), Some(2));
}

fn write_data(dir: &Path, values: &[f64]) -> PathBuf {
    let path = dir.join("t.csv");
    let body: String = std::iter::once("t".to_string())
        .chain(values.iter().map(|v| v.to_string()))
        .collect::<Vec<_>>()
        .join("\n");
    std::fs::write(&path, body + "\n").unwrap();
    path
}

fn analyze_json(data: &Path, n: &str, extra: &[&str]) -> AnalyzeReport {
    let o = run(&[&["analyze", "--data", data.to_str().unwrap(), "--n", n, "--format", "json"][..], extra].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn analyze_constant_column_gives_maximal_bf() {
    let dir = TempDir::new().unwrap();
    let flat = write_data(dir.path(), &[0.3; 6]);
    let r = analyze_json(&flat, "50", &[]);
    assert_eq!(r.q, 0.0);
    assert_eq!(r.sites, 6);
    let spread = write_data(dir.path(), &[0.1, 0.5, 0.2, 0.45, 0.3, 0.0]);
    let r2 = analyze_json(&spread, "50", &[]);
    assert!(r2.q > 0.0 && r2.log_bf01 < r.log_bf01);
    assert!(r.bf01 > 1.0 && r.band.ends_with("for M0"));
}

#[test]
fn analyze_agrees_with_library() {
    let dir = TempDir::new().unwrap();
    let values = [0.12, 0.31, -0.05, 0.4, 0.22, 0.6, 0.18, 0.02];
    let data = write_data(dir.path(), &values);
    let r = analyze_json(&data, "120", &["--seed", "5", "--sigma", "1.5"]);
    let t = EffectSizeVector::new(values.to_vec()).unwrap();
    let prior = AnalysisPriorSample::draw(&PriorSpec::default_analysis(), 10_000, RunStreams::new(5, 8).analysis).unwrap();
    let lib = bf01_from_data(&t, 120, 1.5, &prior).unwrap();
    assert_eq!(r.log_bf01, lib);

    let text = run(&["analyze", "--data", data.to_str().unwrap(), "--n", "120", "--seed", "5", "--sigma", "1.5"]);
    let text = String::from_utf8_lossy(&text.stdout);
    for label in ["Q ", "log BF01", "BF01", "evidence"] {
        assert!(text.contains(label), "{text}");
    }
}

#[test]
fn analyze_bad_data() {
    let dir = TempDir::new().unwrap();
    let one = write_data(dir.path(), &[0.3]);
    let o = run(&["analyze", "--data", one.to_str().unwrap(), "--n", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["analyze", "--data", "/nonexistent.csv", "--n", "10"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn table_csv_round_trips() {
    let dir = TempDir::new().unwrap();
    let reduced = config("reduced.json");
    let out = dir.path().join("u.csv");
    let o = run(&[
        "ssd", "--paper-defaults", "--config", reduced.to_str().unwrap(),
        "--override", "target.mode=unconditional", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = ssd_rows(&out);
    assert!(rows[0].k0.is_some());
    let mut buf = Vec::new();
    hetssd::io::write_rows(&mut buf, &rows).unwrap();
    assert_eq!(buf, std::fs::read(&out).unwrap());
}
