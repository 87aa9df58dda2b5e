//! Exit-code and logging behavior of the binary: unusable invocations exit
//! with 2, a clean run that models nothing exits with 3, the self-check
//! skips honestly on tiny configurations, and SHORTCAST_LOG controls the
//! stderr chatter.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_shortcast");

fn bundled_fixture() -> String {
    format!("{}/../../fixtures/panama", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(BIN)
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn write_file(dir: &Path, name: &str, contents: &str) {
    fs::write(dir.join(name), contents).expect("fixture write");
}

#[test]
fn unknown_area_is_a_usage_error() {
    let out = tempfile::tempdir().expect("tempdir");
    let output = run(&[
        "forecast",
        "--area",
        "Narnia",
        "--data-dir",
        &bundled_fixture(),
        "--out",
        out.path().to_str().expect("utf8"),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("error:") && stderr.contains("Narnia"),
        "stderr was: {stderr}"
    );
}

#[test]
fn missing_data_directory_is_a_usage_error() {
    let out = tempfile::tempdir().expect("tempdir");
    let output = run(&[
        "forecast",
        "--area",
        "Panama",
        "--data-dir",
        "/does/not/exist",
        "--out",
        out.path().to_str().expect("utf8"),
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn emission_only_directory_is_a_usage_error() {
    let data = tempfile::tempdir().expect("tempdir");
    write_file(
        data.path(),
        "emissions.csv",
        "Area,Item,Element,Year,Unit,Value\n\
         Panama,CH4,Direct (CH4),1961,kt,1.0\n",
    );
    let out = tempfile::tempdir().expect("tempdir");
    let output = run(&[
        "forecast",
        "--area",
        "Panama",
        "--data-dir",
        data.path().to_str().expect("utf8"),
        "--out",
        out.path().to_str().expect("utf8"),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("no product data"), "stderr was: {stderr}");
}

#[test]
fn zero_horizon_is_a_usage_error() {
    let out = tempfile::tempdir().expect("tempdir");
    let output = run(&[
        "forecast",
        "--area",
        "Panama",
        "--data-dir",
        &bundled_fixture(),
        "--out",
        out.path().to_str().expect("utf8"),
        "--horizon",
        "0",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("--horizon must be at least 1"),
        "stderr was: {stderr}"
    );
}

#[test]
fn nothing_modeled_exits_three_but_keeps_diagnostics() {
    let data = tempfile::tempdir().expect("tempdir");
    // Four non-constant observations: far too short to test, difference,
    // or fit anything, so the only product is skipped.
    write_file(
        data.path(),
        "production.csv",
        "Area,Item,Element,Year,Unit,Value\n\
         Panama,Taro,Yield,2000,hg/ha,10\n\
         Panama,Taro,Yield,2001,hg/ha,12\n\
         Panama,Taro,Yield,2002,hg/ha,11\n\
         Panama,Taro,Yield,2003,hg/ha,14\n",
    );
    let out = tempfile::tempdir().expect("tempdir");
    let output = run(&[
        "forecast",
        "--area",
        "Panama",
        "--data-dir",
        data.path().to_str().expect("utf8"),
        "--out",
        out.path().to_str().expect("utf8"),
    ]);
    assert_eq!(output.status.code(), Some(3));
    let diagnostics =
        fs::read_to_string(out.path().join("diagnostics.txt")).expect("diagnostics exist");
    assert!(
        diagnostics.contains("not modeled"),
        "diagnostics were: {diagnostics}"
    );
}

#[test]
fn late_train_end_is_a_usage_error() {
    let out = tempfile::tempdir().expect("tempdir");
    let output = run(&[
        "evaluate",
        "--area",
        "Panama",
        "--data-dir",
        &bundled_fixture(),
        "--train-end",
        "2030",
        "--out",
        out.path().to_str().expect("utf8"),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("--train-end"), "stderr was: {stderr}");
}

#[test]
fn selftest_skips_honestly_on_tiny_configurations() {
    let output = run(&["selftest", "--trials", "2"]);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("SKIP"), "stdout was: {stdout}");
    assert!(stdout.contains("result: ok"), "stdout was: {stdout}");
}

#[test]
fn quiet_logging_suppresses_the_summary_line() {
    let out = tempfile::tempdir().expect("tempdir");
    let output = run_with_env(
        &[
            "forecast",
            "--area",
            "Panama",
            "--data-dir",
            &bundled_fixture(),
            "--out",
            out.path().to_str().expect("utf8"),
        ],
        "SHORTCAST_LOG",
        "quiet",
    );
    assert_eq!(output.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        !stderr.contains("modeled"),
        "quiet run still logged: {stderr}"
    );
}

#[test]
fn debug_logging_reports_per_file_parses() {
    let out = tempfile::tempdir().expect("tempdir");
    let output = run_with_env(
        &[
            "forecast",
            "--area",
            "Panama",
            "--data-dir",
            &bundled_fixture(),
            "--out",
            out.path().to_str().expect("utf8"),
        ],
        "SHORTCAST_LOG",
        "debug",
    );
    assert_eq!(output.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("records read"),
        "debug run logged: {stderr}"
    );
}
