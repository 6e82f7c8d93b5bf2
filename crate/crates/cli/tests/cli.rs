use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn write_config(dir: &Path, cfg: &Value) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

fn small_ica(out: &Path) -> Value {
    json!({
        "geometry": {"ellipse": {"alpha": 0.25, "beta": 0.15}},
        "nu": 0.035,
        "waveform": {"path": data("ica_waveform.csv"), "period": 0.95},
        "modes": 8,
        "max_mode": 8,
        "mu_threshold": 1e-10,
        "s_threshold": 1e-10,
        "intervals": 256,
        "phases": [0.1, 0.6],
        "output": out,
    })
}

fn pulseflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pulseflow")).args(args).env("RUST_LOG", "warn").output().unwrap()
}

fn run_ok(args: &[&str]) -> Output {
    let out = pulseflow(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn read(path: PathBuf) -> String {
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn solve_is_deterministic_and_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let cfg = write_config(tmp.path(), &small_ica(&a));
    let c = cfg.to_str().unwrap();
    run_ok(&["solve", "-c", c]);
    run_ok(&["solve", "-c", c, "-o", b.to_str().unwrap(), "--jobs", "2"]);
    for f in ["profiles.csv", "lambda.csv", "truncation.json", "summary.json"] {
        assert_eq!(read(a.join(f)), read(b.join(f)), "{f} differs");
    }
    let summary: Value = serde_json::from_str(&read(a.join("summary.json"))).unwrap();
    assert!(summary["flux_roundtrip"].as_f64().unwrap() < 1e-6);
    assert!(summary["truncation"]["nstar"].as_u64().unwrap() >= 2);
    assert!(summary["diagnostics"]["womersley"].as_f64().unwrap() > 0.0);
    let profiles = read(a.join("profiles.csv"));
    assert_eq!(profiles.lines().count(), 1 + 2 * 2 * 65);
    assert!(profiles.starts_with("t_over_T,axis,coordinate,w,w_over_mean"));
    let timings = read(a.join("timings.json"));
    assert!(timings.contains("S2 truncation"));
    assert!(!a.join("contours.csv").exists());
}

#[test]
fn contours_table_covers_every_pair() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let cfg = write_config(tmp.path(), &small_ica(&out));
    run_ok(&["solve", "-c", cfg.to_str().unwrap(), "--emit-contours"]);
    let report: Value = serde_json::from_str(&read(out.join("truncation.json"))).unwrap();
    let entries = report["entries"].as_array().unwrap().len();
    assert!(entries > 0);
    assert_eq!(read(out.join("contours.csv")).lines().count(), entries + 1);
}

#[test]
fn steady_config_matches_stationary_command() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = json!({
        "geometry": {"elliptical_annulus": {"alpha2": 1.11, "beta2": 0.93, "beta1": 0.43}},
        "nu": 0.01,
        "flux": -0.11,
    });
    let path = write_config(tmp.path(), &cfg);
    let c = path.to_str().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_ok(&["solve", "-c", c, "-o", a.to_str().unwrap()]);
    run_ok(&["stationary", "-c", c, "-o", b.to_str().unwrap()]);
    for f in ["profiles.csv", "lambda.csv", "summary.json"] {
        assert_eq!(read(a.join(f)), read(b.join(f)), "{f} differs");
    }
    let summary: Value = serde_json::from_str(&read(a.join("summary.json"))).unwrap();
    assert!(summary["lambda"][0][0].as_f64().unwrap() < 0.0);
}

#[test]
fn sweep_reuses_the_basis() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let cfg = write_config(tmp.path(), &small_ica(&out));
    let ica = data("ica_waveform.csv");
    let csf = data("csf_waveform.csv");
    let res = run_ok(&[
        "sweep",
        "-c",
        cfg.to_str().unwrap(),
        "--waveform",
        ica.to_str().unwrap(),
        "--waveform",
        csf.to_str().unwrap(),
        "--period",
        "0.95",
    ]);
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("csf_waveform: N* ="), "{stdout}");
    assert!(stdout.contains("S2 skipped"), "{stdout}");
    let first: Value = serde_json::from_str(&read(out.join("ica_waveform/timings.json"))).unwrap();
    let second: Value = serde_json::from_str(&read(out.join("csf_waveform/timings.json"))).unwrap();
    let s2 = |v: &Value| v["stages"].as_array().unwrap().iter().find(|s| s["stage"] == "S2 truncation").cloned().unwrap();
    assert!(s2(&first)["seconds"].is_f64());
    assert!(s2(&second).get("seconds").is_none());
    assert_eq!(s2(&second)["note"], "reused cached basis");
}

#[test]
fn circle_inverse_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("c");
    let cfg = json!({
        "geometry": {"circle": {"radius": 0.2}},
        "nu": 0.035,
        "waveform": {"path": data("ica_waveform.csv"), "period": 0.95},
        "modes": 15,
        "output": out,
    });
    let path = write_config(tmp.path(), &cfg);
    run_ok(&["circle-inverse", "-c", path.to_str().unwrap()]);
    let profiles = read(out.join("profiles.csv"));
    // The wall row of every profile is at rest.
    for line in profiles.lines().skip(1).filter(|l| l.contains(",0.2,")) {
        let w: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(w.abs() < 1e-9, "{line}");
    }
}

#[test]
fn oracle_check_agrees_within_budget() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let cfg = write_config(tmp.path(), &small_ica(&out));
    let res = run_ok(&["oracle-check", "-c", cfg.to_str().unwrap(), "--grid", "64", "--steps", "200"]);
    assert!(String::from_utf8_lossy(&res.stdout).contains("within 1%"));
    let report: Value = serde_json::from_str(&read(out.join("oracle.json"))).unwrap();
    assert!(report["max_deviation"].as_f64().unwrap() < 0.01);
    assert!(report["flux_rms"].as_f64().unwrap() < 0.01);
    assert!(out.join("oracle_profiles.csv").exists());
    assert!(out.join("oracle_flux.csv").exists());
}

#[test]
fn exit_codes_follow_the_failure_kind() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("x");

    let mut bad = small_ica(&out);
    bad["nu"] = json!(-1.0);
    let path = write_config(tmp.path(), &bad);
    assert_eq!(pulseflow(&["solve", "-c", path.to_str().unwrap()]).status.code(), Some(2));

    let mut missing = small_ica(&out);
    missing["waveform"]["path"] = json!(tmp.path().join("nope.csv"));
    let path = write_config(tmp.path(), &missing);
    assert_eq!(pulseflow(&["solve", "-c", path.to_str().unwrap()]).status.code(), Some(4));

    let mut hard = small_ica(&out);
    hard["mu_threshold"] = json!(1e-30);
    hard["cutoff_cap"] = json!(4);
    let path = write_config(tmp.path(), &hard);
    let res = pulseflow(&["solve", "-c", path.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(String::from_utf8_lossy(&res.stderr).contains("S2 truncation"));

    assert_eq!(pulseflow(&["solve"]).status.code(), Some(2));
    assert_eq!(pulseflow(&["frobnicate"]).status.code(), Some(2));
}
