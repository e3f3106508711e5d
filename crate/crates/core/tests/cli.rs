use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_wavespeed"));
    c.env("WAVESPEED_THREADS", "2");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const WHITE: &str = r#"{"vartheta":1.0,"beta":1.0,"d":1}"#;

#[test]
fn constants_text_and_json() {
    let out = run(&["constants", "--beta", "1", "--d", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .lines()
        .any(|l| l.starts_with("c_te_e 0.5") || l.starts_with("c_te_e 0.49999")));
    let out = run(&["constants", "--beta", "1", "--d", "1", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["c_sp_e"].as_f64().unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn invalid_input_exit_code() {
    assert_eq!(
        run(&["constants", "--beta", "3", "--d", "1"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        run(&["--threads", "0", "constants", "--beta", "1", "--d", "1"])
            .status
            .code(),
        Some(1)
    );
    let out = bin()
        .env("WAVESPEED_THREADS", "lots")
        .args(["constants", "--beta", "1", "--d", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cov_toeplitz_and_dense() {
    let dir = tempfile::tempdir().unwrap();
    let design = write(
        dir.path(),
        "d.json",
        r#"{"kind":"spatial","t":1.0,"lambda":0.01,"n":4}"#,
    );
    let params = write(dir.path(), "p.json", WHITE);
    let out = run(&["cov", "--design", s(&design), "--params", s(&params)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gap,covariance");
    assert_eq!(lines.len(), 5);
    let v0: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((v0 - 0.01).abs() < 1e-8);
    let csv = dir.path().join("dense.csv");
    assert!(run(&[
        "cov",
        "--design",
        s(&design),
        "--params",
        s(&params),
        "--dense",
        "--out",
        s(&csv)
    ])
    .status
    .success());
    assert_eq!(std::fs::read_to_string(csv).unwrap().lines().count(), 5);
}

#[test]
fn simulate_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let design = write(
        dir.path(),
        "d.json",
        r#"{"kind":"temporal","delta":0.005,"m":200}"#,
    );
    let params = write(dir.path(), "p.json", r#"{"vartheta":2.0,"beta":1.0,"d":1}"#);
    let data = dir.path().join("x.csv");
    let st = run(&[
        "simulate",
        "--design",
        s(&design),
        "--params",
        s(&params),
        "--reps",
        "3",
        "--seed",
        "9",
        "--out",
        s(&data),
    ]);
    assert!(st.status.success());
    let again = dir.path().join("y.csv");
    run(&[
        "simulate",
        "--design",
        s(&design),
        "--params",
        s(&params),
        "--reps",
        "3",
        "--seed",
        "9",
        "--out",
        s(&again),
    ]);
    assert_eq!(
        std::fs::read(&data).unwrap(),
        std::fs::read(&again).unwrap()
    );

    let out = run(&[
        "estimate",
        "--kind",
        "te",
        "--data",
        s(&data),
        "--design",
        s(&design),
        "--params",
        s(&params),
        "--json",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    for r in v.as_array().unwrap() {
        let e = r["estimate"]["estimate"].as_f64().unwrap();
        assert!(e > 1.0 && e < 4.0, "{e}");
    }
}

#[test]
fn paths_feed_raw_and_mle_estimators() {
    let dir = tempfile::tempdir().unwrap();
    let design = write(
        dir.path(),
        "d.json",
        r#"{"kind":"temporal","delta":0.01,"m":100}"#,
    );
    let params = write(dir.path(), "p.json", WHITE);
    let data = dir.path().join("u.csv");
    assert!(run(&[
        "simulate",
        "--design",
        s(&design),
        "--params",
        s(&params),
        "--paths",
        "--reps",
        "2",
        "--out",
        s(&data)
    ])
    .status
    .success());
    let text = std::fs::read_to_string(&data).unwrap();
    assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 102);

    let raw = run(&[
        "estimate",
        "--kind",
        "te",
        "--raw",
        "--data",
        s(&data),
        "--design",
        s(&design),
        "--params",
        s(&params),
    ]);
    assert!(
        raw.status.success(),
        "{}",
        String::from_utf8_lossy(&raw.stderr)
    );
    assert!(String::from_utf8(raw.stdout)
        .unwrap()
        .starts_with("row,rescaled,estimate,lower,upper"));

    let mle = run(&[
        "estimate",
        "--kind",
        "mle",
        "--data",
        s(&data),
        "--design",
        s(&design),
        "--params",
        s(&params),
    ]);
    assert!(
        mle.status.success(),
        "{}",
        String::from_utf8_lossy(&mle.stderr)
    );
    let out = String::from_utf8(mle.stdout).unwrap();
    assert_eq!(out.lines().count(), 3);
}

#[test]
fn mle_rejects_coloured_noise() {
    let dir = tempfile::tempdir().unwrap();
    let design = write(
        dir.path(),
        "d.json",
        r#"{"kind":"temporal","delta":0.1,"m":3}"#,
    );
    let params = write(dir.path(), "p.json", r#"{"vartheta":1.0,"beta":0.5,"d":1}"#);
    let data = write(dir.path(), "u.csv", "1,2,3\n");
    let out = run(&[
        "estimate",
        "--kind",
        "mle",
        "--data",
        s(&data),
        "--design",
        s(&design),
        "--params",
        s(&params),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn clt_writes_reports_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"kind":"te","design":{"kind":"temporal","delta":0.01,"m":100},"params":{"vartheta":1.0,"beta":1.0,"d":1},"replicates":40,"seed":5}"#,
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&["clt", "--config", s(&cfg), "--out-dir", s(&a)])
        .status
        .success());
    assert!(bin()
        .env("WAVESPEED_THREADS", "1")
        .args(["coverage", "--config", s(&cfg), "--out-dir", s(&b)])
        .status()
        .unwrap()
        .success());
    for f in ["report.json", "replicates.csv", "qq.csv"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn in_process_entry_point() {
    assert_eq!(
        wavespeed::cli::run(["wavespeed", "constants", "--beta", "0.5", "--d", "2"]),
        0
    );
    assert_eq!(
        wavespeed::cli::run(["wavespeed", "constants", "--beta", "0.5"]),
        1
    );
}
