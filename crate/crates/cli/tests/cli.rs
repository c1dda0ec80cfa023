use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn warpineq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpineq")).args(args).output().expect("binary runs")
}

fn warpineq_env(args: &[&str], workers: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpineq"))
        .args(args)
        .env("WARPINEQ_WORKERS", workers)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name} in {header:?}"));
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

fn assert_envelope(v: &Value, command: &str) {
    assert_eq!(v["tool"], "warpineq");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["command"], command);
    assert_eq!(v["config_digest"].as_str().unwrap().len(), 64);
    assert!(v["tolerances"]["equality_curve"].as_f64().is_some());
    assert!(v["tolerances"]["equality_axisym"].as_f64().is_some());
    assert!(v["tolerances"]["drift"].as_f64().is_some());
}

#[test]
fn invalid_flow_pairing_is_a_usage_error() {
    let o = warpineq(&["flow", "--space", "sphere", "--flow", "hyp-mean"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("hyp-mean requires K = -1"), "{}", stderr(&o));
}

#[test]
fn usage_and_numerical_errors_have_distinct_codes() {
    let o = warpineq(&["verify", "--theorem", "minkowski2d", "--shape", "circle:2", "--weight", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
    let o = warpineq(&["verify", "--theorem", "minkowski2d"]);
    assert_eq!(o.status.code(), Some(2));
    let o = warpineq(&["verify", "--theorem", "minkowski2d", "--shape", "sphere:1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = warpineq(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    // a non-convex curve is a convexity failure
    let o = warpineq(&["verify", "--theorem", "minkowski2d", "--shape", "fourier:1:0:0:0:0:0:0:0.3"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("convexity"));
}

#[test]
fn verify_circle_is_equality() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = warpineq(&["verify", "--theorem", "minkowski2d", "--shape", "circle:2", "--weight", "monomial:1", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("-> equality"));
    let v = read_json(&dir.path().join("reports.json"));
    assert_envelope(&v, "verify");
    assert_eq!(v["results"][0]["verdict"], "equality");
    assert_eq!(v["config"]["samples"], 512);
}

#[test]
fn verify_afw_offset_sphere_holds() {
    let o = warpineq(&["verify", "--theorem", "afw", "--k", "1", "--l", "-1", "--shape", "offset_sphere:1:0.3", "--weight", "exp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).trim_end().ends_with("-> holds"), "{}", stdout(&o));
}

#[test]
fn example_suite_on_an_ellipse() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = warpineq(&["verify", "--suite", "example-1.4", "--space", "euclidean", "--shape", "ellipse:2:1", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().all(|l| l.ends_with("-> holds")), "{text}");
    let v = read_json(&dir.path().join("reports.json"));
    let reports = v["results"].as_array().unwrap();
    assert_eq!(reports.len(), 7);
    for (i, r) in reports.iter().enumerate() {
        assert_eq!(r["params"]["item"], i + 1);
        assert_eq!(r["verdict"], "holds");
    }
}

#[test]
fn eigen_circle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = warpineq(&["eigen", "--shape", "circle:2", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = read_json(&dir.path().join("bound.json"));
    assert_envelope(&v, "eigen");
    let r = &v["results"];
    assert_eq!(r["verdict"], "equality");
    assert!((r["lhs"].as_f64().unwrap() - 0.5).abs() < 1e-4);
    assert!((r["rhs"].as_f64().unwrap() - 0.5).abs() < 1e-4);
    let csv = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("index,mode,lambda,residual\n"));
    let l = column(&csv, "lambda");
    assert!((l[1] - 0.5).abs() < 1e-4 && (l[2] - 0.5).abs() < 1e-4, "{l:?}");
}

#[test]
fn sweep_minkowski2d_all_hold() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = warpineq(&["sweep", "--theorem", "minkowski2d", "--count", "20", "--amp", "0.15", "--seed", "7", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("20/20 holds"), "{}", stdout(&o));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 21);
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(2) == Some("holds")));
    let v = read_json(&dir.path().join("summary.json"));
    assert_envelope(&v, "sweep");
    assert_eq!(v["results"]["holds"], 20);
}

#[test]
fn sweep_curve_flow_monotonicity() {
    let o = warpineq(&["sweep", "--flow", "curve-lp", "--count", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("10/10 pass"), "{}", stdout(&o));
}

#[test]
fn imcf_flow_weighted_column_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = warpineq(&[
        "flow", "--space", "euclidean", "--dim", "3", "--flow", "imcf-k", "--k", "1", "--shape", "offset_sphere:1.0:0.3",
        "--weight", "monomial:2", "--out", out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("monitors.csv")).unwrap();
    assert!(csv.starts_with("step,t,maxF,"));
    let w = column(&csv, "weightedRn:1");
    assert!(w.len() > 100);
    for p in w.windows(2) {
        assert!(p[1] <= p[0] * (1.0 + 1e-7), "{p:?}");
    }
    assert!(w[w.len() - 1] < w[0]);
    let v = read_json(&dir.path().join("verdict.json"));
    assert_envelope(&v, "flow");
    assert_eq!(v["results"]["stop"], "stationary");
    assert_eq!(v["results"]["limit"]["verdict"], "equality");
    let shape = read_json(&dir.path().join("final_shape.json"));
    assert_eq!(shape["results"]["rho"].as_array().unwrap().len(), 65);
}

#[test]
fn spherical_curve_flow_preserves_length() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = warpineq(&["flow", "--space", "m2", "--K", "1", "--flow", "curve-lp", "--shape", "fourier:1:0.05:0:0.08:0.02", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("monitors.csv")).unwrap();
    let len = column(&csv, "length");
    let drift = len.iter().map(|l| ((l - len[0]) / len[0]).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-5, "{drift}");
}

#[test]
fn failed_monotonicity_exits_one() {
    // with zero drift tolerance the O(dt²) wiggle of W_-1 counts as a failure
    let o = warpineq(&["flow", "--flow", "imcf-k", "--shape", "offset_sphere:1.0:0.3", "--drift-tol", "0", "--t-max", "0.2"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn outputs_are_deterministic_across_worker_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |d: &Path| -> Vec<String> {
        ["sweep", "--theorem", "minkowski-h", "--space", "hyperbolic", "--count", "4", "--amp", "0.1", "--seed", "5", "--samples", "200", "--weight", "cosh", "--out"]
            .iter()
            .map(|s| s.to_string())
            .chain([d.to_str().unwrap().to_string()])
            .collect()
    };
    let run = |d: &Path, workers: &str| {
        let owned = args(d);
        let refs: Vec<&str> = owned.iter().map(String::as_str).collect();
        let o = warpineq_env(&refs, workers);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    };
    run(a.path(), "1");
    run(b.path(), "2");
    for name in ["sweep.csv", "summary.json"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs between runs");
    }
    let o = warpineq_env(&["verify", "--theorem", "minkowski2d", "--shape", "circle:1"], "zero");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let o = warpineq(&["verify", "--theorem", "minkowski2d", "--shape", "ellipse:2:1", "--weight", "exp", "--out", first.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = read_json(&first.join("reports.json"));

    // the embedded config reproduces the run
    let cfg_path = dir.path().join("config.json");
    fs::write(&cfg_path, serde_json::to_string(&v["config"]).unwrap()).unwrap();
    let second = dir.path().join("second");
    let o = warpineq(&["verify", "--config", cfg_path.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(fs::read(first.join("reports.json")).unwrap(), fs::read(second.join("reports.json")).unwrap());

    // shapes may also be given as tagged objects; flags override the file
    fs::write(&cfg_path, r#"{"theorem": "minkowski2d", "shape": {"type": "ellipse", "a": 2, "b": 1}, "weight": "monomial:1"}"#).unwrap();
    let o = warpineq(&["verify", "--config", cfg_path.to_str().unwrap(), "--weight", "exp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("minkowski2d exp:"));

    fs::write(&cfg_path, r#"{"bogus": 1}"#).unwrap();
    let o = warpineq(&["verify", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
