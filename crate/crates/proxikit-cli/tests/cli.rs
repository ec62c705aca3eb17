//! End-to-end behavior of the `proxikit` binary: exit codes, config
//! precedence, and artifact layout.

use std::path::Path;
use std::process::{Command, Output};

fn proxikit(args: &[&str], dir: &Path, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_proxikit"));
    cmd.args(args)
        .current_dir(dir)
        .env_remove("PROXIKIT_OUT_DIR");
    for (key, value) in env {
        cmd.env(key, value);
    }
    cmd.output().expect("binary runs")
}

const WINDOW: &str = "window_start=0\nwindow_end=3600\n";

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn rejected_rows_exit_2_strict_0_permissive() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    write(
        root,
        "events.csv",
        "start,id_badge_a,id_badge_b,end\n10,1,2,60\n90,3,4,80\n",
    );
    write(
        root,
        "run.conf",
        &format!("{WINDOW}input=events.csv\nout_dir=out\n"),
    );

    let strict = proxikit(&["preprocess", "-c", "run.conf"], root, &[]);
    assert_eq!(strict.status.code(), Some(2));
    // the run still completes and writes its artifacts
    let processed = std::fs::read_to_string(root.join("out/processed.csv")).unwrap();
    assert_eq!(processed.lines().count(), 2, "header plus the good row");
    let report = std::fs::read_to_string(root.join("out/report.csv")).unwrap();
    assert!(report.contains("3"), "report names the bad line: {report}");

    let permissive = proxikit(&["preprocess", "-c", "run.conf", "--permissive"], root, &[]);
    assert_eq!(permissive.status.code(), Some(0));
}

#[test]
fn unknown_config_key_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    write(root, "run.conf", &format!("{WINDOW}inptu=events.csv\n"));
    let out = proxikit(&["preprocess", "-c", "run.conf"], root, &[]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("inptu"), "names the offender: {stderr}");
}

#[test]
fn out_dir_precedence_env_beats_file_flags_beat_env() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    write(
        root,
        "events.csv",
        "start,id_badge_a,id_badge_b,end\n10,1,2,60\n",
    );
    write(
        root,
        "run.conf",
        &format!("{WINDOW}input=events.csv\nout_dir=from_file\n"),
    );

    let env = proxikit(
        &["preprocess", "-c", "run.conf"],
        root,
        &[("PROXIKIT_OUT_DIR", "from_env")],
    );
    assert_eq!(env.status.code(), Some(0));
    assert!(root.join("from_env/processed.csv").exists());
    assert!(!root.join("from_file").exists());

    let set = proxikit(
        &["preprocess", "-c", "run.conf", "--set", "out_dir=from_set"],
        root,
        &[("PROXIKIT_OUT_DIR", "from_env_2")],
    );
    assert_eq!(set.status.code(), Some(0));
    assert!(root.join("from_set/processed.csv").exists());
    assert!(!root.join("from_env_2").exists());
}

#[test]
fn every_run_writes_manifest_and_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    write(
        root,
        "events.csv",
        "start,id_badge_a,id_badge_b,end\n10,1,2,60\n",
    );
    write(
        root,
        "run.conf",
        &format!("{WINDOW}input=events.csv\npipeline=interpolate:75\nout_dir=out\n"),
    );
    let out = proxikit(&["preprocess", "-c", "run.conf"], root, &[]);
    assert_eq!(out.status.code(), Some(0));

    let manifest = std::fs::read_to_string(root.join("out/manifest.csv")).unwrap();
    assert!(manifest.starts_with("file,sha256,bytes\n"));
    for artifact in ["processed.csv", "report.csv", "run_config.txt"] {
        assert!(manifest.contains(artifact), "{artifact} in manifest");
    }
    let config = std::fs::read_to_string(root.join("out/run_config.txt")).unwrap();
    assert!(config.contains("pipeline=interpolate:75"));
    assert!(config.contains("command=preprocess"));
}

#[test]
fn validate_reports_the_library_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    // 50 measured of 100 true seconds on one dyad, nothing else
    write(
        root,
        "measured.csv",
        "start,id_badge_a,id_badge_b,end\n0,1,2,50\n",
    );
    write(
        root,
        "truth.csv",
        "start,id_badge_a,id_badge_b,end\n0,1,2,100\n",
    );
    write(
        root,
        "run.conf",
        &format!("{WINDOW}input=measured.csv\ntruth=truth.csv\nout_dir=out\n"),
    );
    let out = proxikit(&["validate", "-c", "run.conf"], root, &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let metrics = std::fs::read_to_string(root.join("out/metrics.csv")).unwrap();
    let field = |name: &str| -> String {
        metrics
            .lines()
            .find(|l| l.starts_with(name))
            .unwrap_or_else(|| panic!("{name} in {metrics}"))
            .split(',')
            .nth(1)
            .unwrap()
            .to_string()
    };
    assert_eq!(field("true_positive"), "50");
    assert_eq!(field("false_negative"), "50");
    assert_eq!(field("sensitivity"), "0.500000");
    assert_eq!(field("specificity"), "1.000000");
}

#[test]
fn missing_input_fails_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    write(
        root,
        "run.conf",
        &format!("{WINDOW}input=absent.csv\nout_dir=out\n"),
    );
    let out = proxikit(&["preprocess", "-c", "run.conf"], root, &[]);
    assert_eq!(out.status.code(), Some(1));
}
