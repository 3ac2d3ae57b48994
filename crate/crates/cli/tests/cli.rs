//! End-to-end tests of the fisherlab binary: flag handling, exit codes,
//! output determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fisherlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn eval_matches_reference_values() {
    let out = run(&["eval", "--quantity", "qfi", "--n", "2", "--eta", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("qfi = 12"), "{}", stdout(&out));

    let out = run(&[
        "eval",
        "--quantity",
        "sql",
        "--k",
        "2",
        "--eta",
        "0.95",
        "--eta-d",
        "0.6",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("sql = 2.28"), "{}", stdout(&out));

    let out = run(&["eval", "--quantity", "qfi", "--n", "1", "--eta", "0.5"]);
    assert!(out.status.success());
    let line = stdout(&out);
    let value: f64 = line
        .lines()
        .next()
        .and_then(|l| l.strip_prefix("qfi = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 1.6).abs() < 1e-10);
}

#[test]
fn exit_codes() {
    // Usage error: unknown flag.
    let out = run(&["eval", "--quantity", "qfi", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));

    // Usage error: out-of-range efficiency.
    let out = run(&["eval", "--quantity", "cfi", "--n", "1", "--eta", "1.5"]);
    assert_eq!(out.status.code(), Some(2));

    // Numerical diagnostic: so close to the degenerate phase that an outcome
    // probability is below the floor while its derivative is still live.
    let out = run(&[
        "eval",
        "--quantity",
        "cfi",
        "--n",
        "1",
        "--phi",
        "0.0000001",
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    // Exactly on the stationary phase every derivative vanishes too: the
    // pointwise information is simply 0.
    let out = run(&["eval", "--quantity", "cfi", "--n", "1", "--phi", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("cfi = 0"));

    // Validation failure under --strict-p2 (the transcribed two-pair forms
    // are knowingly defective).
    let out = run(&["validate", "--strict-p2", "--draws", "20"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("FAIL"));

    // Default validation passes.
    let out = run(&["validate", "--draws", "40"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn sweeps_are_deterministic_and_thread_independent() {
    let dir = std::env::temp_dir();
    let a = dir.join("fisherlab_sweep_a.csv");
    let b = dir.join("fisherlab_sweep_b.csv");
    let common = [
        "sweep",
        "--quantity",
        "ratio",
        "--k",
        "2",
        "--eta-p",
        "0.6:1:3",
        "--eta",
        "0.5:1:3",
        "--eta-d",
        "0.6:1:2",
    ];
    let run_to = |path: &PathBuf, threads: &str| {
        let out = bin()
            .args(common)
            .args(["--output", path.to_str().unwrap(), "--threads", threads])
            .output()
            .unwrap();
        assert!(out.status.success());
        std::fs::read(path).unwrap()
    };
    let first = run_to(&a, "1");
    let second = run_to(&b, "4");
    assert_eq!(first, second, "sweep output depends on thread count");
    assert!(first.starts_with(b"eta_p,eta,eta_d,best_phi,f_best,f_sql,ratio\n"));
}

#[test]
fn empty_grid_writes_header_only() {
    let path = std::env::temp_dir().join("fisherlab_empty.csv");
    let out = bin()
        .args([
            "sweep",
            "--quantity",
            "qfi",
            "--n",
            "1",
            "--eta",
            "0:1:0",
            "--output",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, "eta,qfi\n");
}

#[test]
fn json_format_round_trips() {
    let out = run(&[
        "sweep",
        "--quantity",
        "qfi",
        "--n",
        "2",
        "--eta",
        "0:1:3",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let parsed: Vec<serde_json::Value> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed.len(), 3);
    assert!((parsed[2]["qfi"].as_f64().unwrap() - 12.0).abs() < 1e-9);
    assert!((parsed[2]["eta"].as_f64().unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn figure_sweeps_have_expected_shape() {
    let out = run(&["sweep", "--quantity", "figure3", "--resolution", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("eta_p,eta,eta_d,ratio,feasible"));
    assert_eq!(text.lines().count(), 1 + 5 * 5 * 5);
    // The perfect corner is feasible.
    assert!(text.lines().last().unwrap().ends_with("true"));

    let out = run(&["sweep", "--quantity", "figure4", "--resolution", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("k,eta_p,eta,eta_d,ratio,feasible"));
    assert_eq!(text.lines().count(), 1 + 2 * 27);

    let out = run(&[
        "sweep",
        "--quantity",
        "figure2",
        "--photons",
        "4",
        "--eta",
        "0.5:1:2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("eta,sql,hb,noon,optimal"));
    // At eta = 1 the optimal probe reaches 16 = 4^2.
    let last = text.lines().last().unwrap();
    let optimal: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    assert!((optimal - 16.0).abs() < 1e-6, "{last}");
}
