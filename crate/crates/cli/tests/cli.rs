use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn mmlab(args: &[&str], stdin: Option<&str>, workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mmlab"));
    cmd.args(args).env_remove("MMLAB_WORKERS");
    if let Some(w) = workers {
        cmd.env("MMLAB_WORKERS", w);
    }
    cmd.stdin(if stdin.is_some() {
        Stdio::piped()
    } else {
        Stdio::null()
    })
    .stdout(Stdio::piped())
    .stderr(Stdio::piped());
    let mut child = cmd.spawn().unwrap();
    if let Some(text) = stdin {
        child
            .stdin
            .take()
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
    }
    child.wait_with_output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn profile_config(out: &Path) -> String {
    format!(
        r#"{{
  "experiment": "profile",
  "space": {{"kind": "sphere", "n": 30}},
  "function": "coordinate",
  "N": 5000,
  "epsGrid": {{"min": 0.05, "max": 0.4, "count": 4}},
  "seed": 42,
  "out": "{}"
}}"#,
        out.display()
    )
}

#[test]
fn run_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.json", &profile_config(&dir.path().join("p")));
    let out = mmlab(&["run", &cfg], None, None);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert!(csv.starts_with("epsilon,tail,stderr,bound\n"));
    assert_eq!(csv.lines().count(), 5);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("p.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["config"]["seed"], 42);
    assert!(manifest["wallTimeSeconds"].is_number());
}

#[test]
fn same_csv_across_worker_counts_and_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let body = profile_config(&dir.path().join("unused"));
    let cfg = write_config(dir.path(), "p.json", &body);
    let a = dir.path().join("a").to_string_lossy().into_owned();
    let b = dir.path().join("b").to_string_lossy().into_owned();
    let c = dir.path().join("c").to_string_lossy().into_owned();
    assert!(
        mmlab(&["run", &cfg, "--out", &a, "--workers", "1"], None, None)
            .status
            .success()
    );
    assert!(mmlab(&["run", &cfg, "--out", &b], None, Some("4"))
        .status
        .success());
    assert!(mmlab(&["run", "-", "--out", &c], Some(&body), None)
        .status
        .success());
    let read = |p: &str| std::fs::read(format!("{p}.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_eq!(read(&a), read(&c));
}

#[test]
fn seed_override_changes_the_sample() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.json", &profile_config(&dir.path().join("x")));
    let a = dir.path().join("a").to_string_lossy().into_owned();
    let b = dir.path().join("b").to_string_lossy().into_owned();
    assert!(mmlab(&["run", &cfg, "--out", &a], None, None)
        .status
        .success());
    assert!(
        mmlab(&["run", &cfg, "--out", &b, "--seed", "7"], None, None)
            .status
            .success()
    );
    let manifest = std::fs::read_to_string(format!("{b}.manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 7"));
    assert_ne!(
        std::fs::read(format!("{a}.csv")).unwrap(),
        std::fs::read(format!("{b}.csv")).unwrap()
    );
}

#[test]
fn invalid_config_exits_1_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let body = profile_config(&dir.path().join("p")).replace("\"N\": 5000", "\"N\": 50");
    let cfg = write_config(dir.path(), "bad.json", &body);
    let out = mmlab(&["run", &cfg], None, None);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json") && err.contains("line 5"), "{err}");
    assert!(!dir.path().join("p.csv").exists());

    assert_eq!(
        mmlab(&["run", "/nonexistent/config.json"], None, None)
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        mmlab(&["run", "-"], Some("{not json"), None).status.code(),
        Some(1)
    );
    assert_eq!(mmlab(&["frobnicate"], None, None).status.code(), Some(1));
    assert_eq!(
        mmlab(&["run", &cfg, "--workers", "0"], None, None)
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn estimator_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // A band of width 1e-300 around a midpoint median holds no sample.
    let body = format!(
        r#"{{"experiment": "waist", "space": {{"kind": "sphere", "n": 3}}, "function": "distance-to-pole",
  "N": 10000, "epsGrid": {{"min": 0.1, "max": 0.2, "count": 2}}, "delta": 1e-300, "out": "{}"}}"#,
        dir.path().join("w").display()
    );
    let cfg = write_config(dir.path(), "w.json", &body);
    let out = mmlab(&["run", &cfg], None, None);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("waist"));
}

#[test]
fn n1_and_euler_reports() {
    let dir = tempfile::tempdir().unwrap();
    let n1 = write_config(
        dir.path(),
        "n1.json",
        &format!(
            r#"{{"experiment": "n1", "diameters": [1], "out": "{}"}}"#,
            dir.path().join("n1").display()
        ),
    );
    assert!(mmlab(&["run", &n1], None, None).status.success());
    let csv = std::fs::read_to_string(dir.path().join("n1.csv")).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap().split(',').nth(1), Some("13"));

    let euler = write_config(
        dir.path(),
        "e.json",
        &format!(
            r#"{{"experiment": "euler", "space": {{"kind": "sphere", "n": 4}}, "out": "{}"}}"#,
            dir.path().join("e").display()
        ),
    );
    assert!(mmlab(&["run", &euler], None, None).status.success());
    let csv = std::fs::read_to_string(dir.path().join("e.csv")).unwrap();
    assert_eq!(csv.lines().nth(1), Some("sphere,4,2,1,2"));
}

#[test]
fn fixtures_catalog() {
    let a = mmlab(&["fixtures"], None, None);
    let b = mmlab(&["fixtures"], None, None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8_lossy(&a.stdout);
    assert!(text.contains("grassmann-tail"));
    assert!(text.contains("s2-pole-distance"));
    let json = mmlab(&["fixtures", "--json"], None, None);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert!(v.as_array().unwrap().len() > 10);
}

#[test]
fn sample_dump() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("s").to_string_lossy().into_owned();
    let out = mmlab(
        &[
            "sample",
            "--space",
            "grassmannian",
            "--n",
            "4",
            "--k",
            "2",
            "--count",
            "5",
            "--seed",
            "3",
            "--out",
            &prefix,
        ],
        None,
        None,
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(format!("{prefix}.csv")).unwrap();
    assert!(csv.starts_with("# space=grassmannian dim=4 ambient=8 count=5\nx0,"));
    assert_eq!(csv.lines().count(), 7);
    let bad = mmlab(
        &[
            "sample", "--space", "torus", "--n", "4", "--count", "5", "--out", &prefix,
        ],
        None,
        None,
    );
    assert_eq!(bad.status.code(), Some(1));
}
