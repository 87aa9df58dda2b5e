//! Release acceptance checklist, command-line half.
//!
//! Criteria 7, 8, and 10 exercise the built binary end to end: the shortage
//! ranking rule on a constructed five-product data set, the reported
//! train/test split shape on the bundled fixture, and byte-identical output
//! across repeated runs. Each prints one `ACCEPTANCE <n> <name>: PASS` line
//! (visible under `cargo test -- --nocapture`). Criteria 1-6 and 9 live in
//! the library crate's acceptance target.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_shortcast");

fn bundled_fixture() -> String {
    format!("{}/../../fixtures/panama", env!("CARGO_MANIFEST_DIR"))
}

/// Runs one criterion body and prints the verdict line.
fn criterion(number: u32, name: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("ACCEPTANCE {number} {name}: PASS"),
        Err(why) => {
            println!("ACCEPTANCE {number} {name}: FAIL - {why}");
            panic!("acceptance criterion {number} ({name}) failed: {why}");
        }
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($arg)+));
        }
    };
}

fn run(args: &[&str]) -> Result<Output, String> {
    Command::new(BIN)
        .args(args)
        .output()
        .map_err(|e| format!("spawning {BIN}: {e}"))
}

fn ensure_success(output: &Output, what: &str) -> Result<(), String> {
    if output.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{what} exited with {:?}: {}",
            output.status.code(),
            String::from_utf8_lossy(&output.stderr)
        ))
    }
}

/// Writes a five-product yield data set spanning 1959..=2019 in which
/// exactly B and D fall below half their historical mean ten years out:
/// over 61 years a linear ramp has mean (first+last)/2 and a ten-step
/// continuation of slope s ends 40s below that mean, so B (slope -2) and
/// D (slope -1.5) are short by exactly 80 and 60 while A and E (constant)
/// and C (rising) stay clear.
fn write_ramp_fixture(dir: &Path) -> Result<(), String> {
    let mut csv = String::from("Area,Item,Element,Year,Unit,Value\n");
    for t in 0..=60i32 {
        let year = 1959 + t;
        let t = f64::from(t);
        let rows = [
            ("A", 90.0),
            ("B", 160.0 - 2.0 * t),
            ("C", 50.0 + t),
            ("D", 120.0 - 1.5 * t),
            ("E", 400.0),
        ];
        for (item, value) in rows {
            csv.push_str(&format!("Atlantis,{item},Yield,{year},hg/ha,{value}\n"));
        }
    }
    fs::write(dir.join("production.csv"), csv).map_err(|e| format!("writing fixture: {e}"))
}

/// Criterion 7: the shortage rule flags exactly the two engineered
/// shortfalls, ranked by deviation, and --top-k truncates the ranking.
#[test]
fn acceptance_7_shortage_rule() {
    criterion(7, "shortage-rule", || {
        let data = tempfile::tempdir().map_err(|e| format!("tempdir: {e}"))?;
        write_ramp_fixture(data.path())?;
        let data_dir = data.path().to_str().expect("utf8 tempdir");

        let out2 = tempfile::tempdir().map_err(|e| format!("tempdir: {e}"))?;
        let output = run(&[
            "forecast",
            "--area",
            "Atlantis",
            "--data-dir",
            data_dir,
            "--out",
            out2.path().to_str().expect("utf8 tempdir"),
            "--top-k",
            "2",
        ])?;
        ensure_success(&output, "forecast --top-k 2")?;
        let stderr = String::from_utf8_lossy(&output.stderr);
        ensure!(
            stderr.contains("modeled 5 of 5 products"),
            "expected all five products modeled, stderr was: {stderr}"
        );
        let report = fs::read_to_string(out2.path().join("shortage_report.csv"))
            .map_err(|e| format!("reading shortage report: {e}"))?;
        let expected = "\
product,recent_forecast,historical_mean,deviation
B | Yield,20,100,80
D | Yield,15,75,60
";
        ensure!(
            report == expected,
            "--top-k 2 report differs:\n--- expected ---\n{expected}\n--- emitted ---\n{report}"
        );

        let out1 = tempfile::tempdir().map_err(|e| format!("tempdir: {e}"))?;
        let output = run(&[
            "forecast",
            "--area",
            "Atlantis",
            "--data-dir",
            data_dir,
            "--out",
            out1.path().to_str().expect("utf8 tempdir"),
            "--top-k",
            "1",
        ])?;
        ensure_success(&output, "forecast --top-k 1")?;
        let report = fs::read_to_string(out1.path().join("shortage_report.csv"))
            .map_err(|e| format!("reading shortage report: {e}"))?;
        let expected = "\
product,recent_forecast,historical_mean,deviation
B | Yield,20,100,80
";
        ensure!(
            report == expected,
            "--top-k 1 report differs:\n--- expected ---\n{expected}\n--- emitted ---\n{report}"
        );
        Ok(())
    });
}

/// Criterion 8: evaluating the bundled 1961-2019 fixture with the default
/// 2010 cut reports a 50-row training window and a 9-row held-out window.
#[test]
fn acceptance_8_split_shape() {
    criterion(8, "split-shape", || {
        let out = tempfile::tempdir().map_err(|e| format!("tempdir: {e}"))?;
        let output = run(&[
            "evaluate",
            "--area",
            "Panama",
            "--data-dir",
            &bundled_fixture(),
            "--train-end",
            "2010",
            "--out",
            out.path().to_str().expect("utf8 tempdir"),
        ])?;
        ensure_success(&output, "evaluate")?;
        let stdout = String::from_utf8_lossy(&output.stdout);
        ensure!(
            stdout.contains("50 training rows, 9 held-out rows"),
            "stdout does not state the 50/9 split:\n{stdout}"
        );
        let diagnostics = fs::read_to_string(out.path().join("diagnostics.txt"))
            .map_err(|e| format!("reading diagnostics: {e}"))?;
        ensure!(
            diagnostics.contains("split: 50 training rows, 9 held-out rows"),
            "diagnostics do not state the 50/9 split:\n{diagnostics}"
        );
        Ok(())
    });
}

/// Criterion 10: two forecast runs over the bundled fixture produce
/// byte-identical files.
#[test]
fn acceptance_10_end_to_end_determinism() {
    criterion(10, "end-to-end-determinism", || {
        let mut snapshots = Vec::new();
        for _ in 0..2 {
            let out = tempfile::tempdir().map_err(|e| format!("tempdir: {e}"))?;
            let output = run(&[
                "forecast",
                "--area",
                "Panama",
                "--data-dir",
                &bundled_fixture(),
                "--out",
                out.path().to_str().expect("utf8 tempdir"),
            ])?;
            ensure_success(&output, "forecast")?;
            let mut files = BTreeMap::new();
            let entries =
                fs::read_dir(out.path()).map_err(|e| format!("listing outputs: {e}"))?;
            for entry in entries {
                let entry = entry.map_err(|e| format!("listing outputs: {e}"))?;
                let name = entry.file_name().to_string_lossy().into_owned();
                let bytes =
                    fs::read(entry.path()).map_err(|e| format!("reading {name}: {e}"))?;
                files.insert(name, bytes);
            }
            ensure!(
                !files.is_empty(),
                "the forecast run produced no output files"
            );
            snapshots.push(files);
        }
        let (first, second) = (&snapshots[0], &snapshots[1]);
        let first_names: Vec<_> = first.keys().collect();
        let second_names: Vec<_> = second.keys().collect();
        ensure!(
            first_names == second_names,
            "runs produced different file sets: {first_names:?} vs {second_names:?}"
        );
        for (name, bytes) in first {
            ensure!(
                second[name] == *bytes,
                "{name} differs between runs"
            );
        }
        Ok(())
    });
}
