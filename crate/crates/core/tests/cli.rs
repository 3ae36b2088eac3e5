use std::path::{Path, PathBuf};
use std::process::Command;

fn bundled() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_5000.csv")
}

fn backtest(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_backtest"))
        .args(args)
        .output()
        .expect("spawn backtest")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn both_modes_write_reports_and_combined_table() {
    let out = tempfile::tempdir().unwrap();
    let o = backtest(&[
        "--data",
        bundled().to_str().unwrap(),
        "--mode",
        "both",
        "--runs",
        "8",
        "--seed",
        "3",
        "--slice",
        "0:1500",
        "--trace",
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    for mode in ["agent", "random"] {
        let dir = out.path().join(mode);
        assert_eq!(read(&dir, "total.txt").lines().count(), 8);
        let report: serde_json::Value = serde_json::from_str(&read(&dir, "report.json")).unwrap();
        assert_eq!(report["mode"], mode);
        assert_eq!(report["series_len"], 1500);
        assert_eq!(report["slice"], serde_json::json!([0, 1500]));
    }
    assert!(out.path().join("agent/trace.jsonl").exists());
    assert_eq!(read(&out.path().join("random"), "sav.txt").lines().count(), 8);

    let summary = read(out.path(), "summary.txt");
    for label in ["Non-random twth", "sav", "Random twth", "Median", "St. Dev."] {
        assert!(summary.contains(label), "missing {label} in\n{summary}");
    }
}

#[test]
fn synthetic_generator_feeds_backtest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("walk.csv");
    let g = Command::new(env!("CARGO_BIN_EXE_synth-klines"))
        .args(["--points", "300", "--seed", "5", "--out", csv.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(g.status.success(), "{}", String::from_utf8_lossy(&g.stderr));

    let run = |out: &Path| {
        let o = backtest(&[
            "--data",
            csv.to_str().unwrap(),
            "--runs",
            "5",
            "--seed",
            "9",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        read(out, "total.txt")
    };
    assert_eq!(run(&dir.path().join("a")), run(&dir.path().join("b")));
}

#[test]
fn config_file_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "fee_rate = 0.0\ninitial_mon = 250.0\n").unwrap();
    let o = backtest(&[
        "--data",
        bundled().to_str().unwrap(),
        "--slice",
        ":200",
        "--mode",
        "random",
        "--runs",
        "3",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("out"), "report.json")).unwrap();
    assert_eq!(report["config"]["fee_rate"], 0.0);
    assert_eq!(report["loss_threshold"], 250.0);
}

#[test]
fn bad_inputs_exit_with_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let missing = backtest(&["--data", "/nonexistent.csv", "--runs", "1", "--out", out]);
    assert_eq!(missing.status.code(), Some(2));

    let bundled = bundled();
    let bundled = bundled.to_str().unwrap();
    let bad_slice = backtest(&["--data", bundled, "--slice", "10:5", "--out", out]);
    assert_eq!(bad_slice.status.code(), Some(2));

    let unknown = dir.path().join("bad.toml");
    std::fs::write(&unknown, "no_such_key = 1\n").unwrap();
    let bad_cfg = backtest(&["--data", bundled, "--config", unknown.to_str().unwrap(), "--out", out]);
    assert_eq!(bad_cfg.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&bad_cfg.stderr).is_empty());
}
