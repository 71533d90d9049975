// Black-box tests against the compiled binary: flag handling, exit codes,
// output shapes, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn otperm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otperm")).args(args).output().expect("binary runs")
}

fn otperm_in(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_otperm"));
    cmd.current_dir(dir).args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

/// Split one CSV row, honoring double-quoted fields (scenario names can
/// contain commas).
fn split_csv(row: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut in_quotes = false;
    let mut chars = row.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if in_quotes && chars.peek() == Some(&'"') => {
                chars.next();
                cur.push('"');
            }
            '"' => in_quotes = !in_quotes,
            ',' if !in_quotes => fields.push(std::mem::take(&mut cur)),
            c => cur.push(c),
        }
    }
    fields.push(cur);
    fields
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

const DEMO: &str = "value,group\n0.8,a\n1.2,a\n-0.3,a\n0.5,a\n2.1,a\n\
                    2.9,b\n3.4,b\n2.2,b\n3.8,b\n2.6,b\n\
                    1.1,c\n0.2,c\n1.9,c\n0.7,c\n1.4,c\n";

fn write_demo(dir: &Path) -> String {
    let path = dir.join("demo.csv");
    std::fs::write(&path, DEMO).unwrap();
    path.display().to_string()
}

#[test]
fn test_subcommand_emits_json_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_demo(dir.path());
    let args = [
        "test",
        "--input",
        &input,
        "--stat",
        "pairwise-t",
        "--method",
        "t-P",
        "--nR",
        "20",
        "--nS",
        "50",
        "--B",
        "999",
        "--alpha",
        "0.05",
        "--seed",
        "7",
    ];
    let first = otperm(&args);
    assert_eq!(code(&first), 0, "stderr: {}", stderr_str(&first));
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&first)).expect("valid JSON");
    let p_e = doc["p_e"].as_f64().unwrap();
    assert!(p_e > 0.0 && p_e <= 1.0);
    assert!(doc["p_a"].is_f64());
    assert_eq!(doc["B"].as_u64(), Some(999));
    assert_eq!(doc["contributions"].as_array().unwrap().len(), 2);
    assert!(doc["decision"].is_string());
    assert_eq!(doc["seeds"]["ensemble"].as_u64(), Some(7));

    let second = otperm(&args);
    assert_eq!(first.stdout, second.stdout, "same command, same bytes");
}

#[test]
fn combining_method_reports_only_the_p_value() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_demo(dir.path());
    let out = otperm(&[
        "test",
        "--input",
        &input,
        "--stat",
        "pairwise-t",
        "--method",
        "combine-fisher",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(doc["p_e"].is_f64());
    assert!(doc["p_a"].is_null());
    assert!(doc["direction"].is_null());
    assert!(doc["grid"].is_null());
    assert_eq!(doc["method"].as_str(), Some("combining(fisher)"));
}

#[test]
fn malformed_row_is_a_data_error_with_its_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "value,group\n1.0,a\nnot-a-number,b\n").unwrap();
    let out = otperm(&[
        "test",
        "--input",
        path.to_str().unwrap(),
        "--stat",
        "pairwise-t",
        "--method",
        "combine-fisher",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr_str(&out).contains("line 3"), "stderr: {}", stderr_str(&out));
}

#[test]
fn too_small_group_is_named_in_the_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("thin.csv");
    std::fs::write(&path, "value,group\n1.0,a\n2.0,a\n3.0,lonely\n").unwrap();
    let out = otperm(&[
        "test",
        "--input",
        path.to_str().unwrap(),
        "--stat",
        "pairwise-t",
        "--method",
        "combine-fisher",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr_str(&out).contains("lonely"), "stderr: {}", stderr_str(&out));
}

#[test]
fn unknown_names_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_demo(dir.path());
    let bad_method =
        otperm(&["test", "--input", &input, "--stat", "pairwise-t", "--method", "bogus"]);
    assert_eq!(code(&bad_method), 64);
    let bad_stat = otperm(&["test", "--input", &input, "--stat", "bogus", "--method", "t-P"]);
    assert_eq!(code(&bad_stat), 64);
    let bad_flag = otperm(&["test", "--no-such-flag"]);
    assert_eq!(code(&bad_flag), 64);
    let help = otperm(&["--help"]);
    assert_eq!(code(&help), 0);
}

#[test]
fn grid_row_counts_match_the_advertised_sizes() {
    let product = otperm(&["grid", "--kind", "product", "--d", "2", "--nR", "12", "--nS", "12"]);
    assert_eq!(code(&product), 0);
    assert_eq!(stdout_str(&product).lines().count(), 144);

    let lattice =
        otperm(&["grid", "--kind", "nonproduct", "--d", "2", "--B", "986", "--h", "1,610"]);
    assert_eq!(code(&lattice), 0);
    assert_eq!(stdout_str(&lattice).lines().count(), 987);

    let positive = otperm(&[
        "grid",
        "--kind",
        "product",
        "--orthant",
        "positive",
        "--d",
        "2",
        "--nR",
        "40",
        "--nS",
        "25",
    ]);
    assert_eq!(code(&positive), 0);
    let text = stdout_str(&positive);
    assert_eq!(text.lines().count(), 1000);
    for line in text.lines() {
        for field in line.split(',') {
            assert!(field.parse::<f64>().unwrap() >= 0.0, "negative coordinate in {line}");
        }
    }
}

#[test]
fn grid_output_round_trips_exactly() {
    use otperm::grids::{build_grid, GridOrthant, GridSpec, LowDiscSource};
    let out = otperm(&["grid", "--kind", "product", "--d", "2", "--nR", "12", "--nS", "12"]);
    assert_eq!(code(&out), 0);
    let spec = GridSpec::product(2, 12, 12, 0, GridOrthant::Full, LowDiscSource::Builtin).unwrap();
    let grid = build_grid(&spec).unwrap();
    for (i, line) in stdout_str(&out).lines().enumerate() {
        let parsed: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        let expected = grid.points().row(i);
        assert_eq!(parsed.len(), expected.len());
        for (a, b) in parsed.iter().zip(expected) {
            assert!((a - b).abs() <= 1e-15, "row {i}: {a} vs {b}");
        }
    }
}

#[test]
fn simulate_writes_one_csv_row_per_method() {
    let out = otperm(&["simulate", "--scenario", "T1-A2-n10", "--reps", "2", "--seed", "1"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("scenario,method,rate,se,mean_contrib_1,mean_contrib_2,mean_angle")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 10, "one row per catalog method");
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0], "A2-n10");
        let rate: f64 = fields[2].parse().unwrap();
        assert!((0.0..=1.0).contains(&rate));
    }
}

#[test]
fn simulate_rejects_unknown_scenarios_with_the_catalog() {
    let out = otperm(&["simulate", "--scenario", "no-such-scenario"]);
    assert_eq!(code(&out), 64);
    let err = stderr_str(&out);
    assert!(err.contains("H0-n5"), "listing missing: {err}");
    assert!(err.contains("T5-mu2-sigma2-normal"), "listing missing: {err}");
}

#[test]
fn config_file_fills_gaps_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_demo(dir.path());
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "stat = \"pairwise-t\"\nmethod = \"t-P\"\nnR = 20\nnS = 50\nalpha = 0.05\nseed = 7\n",
    )
    .unwrap();
    let cfg = config.to_str().unwrap();

    let from_config = otperm(&["test", "--input", &input, "--config", cfg]);
    assert_eq!(code(&from_config), 0, "stderr: {}", stderr_str(&from_config));
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&from_config)).unwrap();
    assert_eq!(doc["alpha"].as_f64(), Some(0.05));
    assert_eq!(doc["seeds"]["ensemble"].as_u64(), Some(7));

    let flag_wins = otperm(&["test", "--input", &input, "--config", cfg, "--alpha", "0.01"]);
    assert_eq!(code(&flag_wins), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&flag_wins)).unwrap();
    assert_eq!(doc["alpha"].as_f64(), Some(0.01), "explicit flag beats the config file");

    let unknown_key = dir.path().join("typo.toml");
    std::fs::write(&unknown_key, "nr = 20\n").unwrap();
    let rejected = otperm(&["test", "--input", &input, "--config", unknown_key.to_str().unwrap()]);
    assert_eq!(code(&rejected), 64, "typo keys are reported, not ignored");
}

#[test]
fn thread_cap_does_not_change_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["simulate", "--scenario", "B1-n5", "--reps", "2", "--seed", "3"];
    let capped = otperm_in(dir.path(), &args, &[("OTPERM_THREADS", "1")]);
    let free = otperm_in(dir.path(), &args, &[]);
    assert_eq!(code(&capped), 0, "stderr: {}", stderr_str(&capped));
    assert_eq!(code(&free), 0);
    assert_eq!(capped.stdout, free.stdout, "thread count must not leak into results");

    let bad = otperm_in(dir.path(), &args, &[("OTPERM_THREADS", "zero")]);
    assert_eq!(code(&bad), 64);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_demo(dir.path());
    let out_path = dir.path().join("report.json");
    let to_stdout = otperm(&[
        "test",
        "--input",
        &input,
        "--stat",
        "pairwise-t",
        "--method",
        "t-P+",
        "--nR",
        "40",
        "--nS",
        "25",
        "--seed",
        "11",
    ]);
    assert_eq!(code(&to_stdout), 0);
    let to_file = otperm(&[
        "test",
        "--input",
        &input,
        "--stat",
        "pairwise-t",
        "--method",
        "t-P+",
        "--nR",
        "40",
        "--nS",
        "25",
        "--seed",
        "11",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&to_file), 0);
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&out_path).unwrap(), to_stdout.stdout);
}

#[test]
fn whole_catalog_run_pads_columns_up_to_d3() {
    let out = otperm(&["simulate", "--scenario", "all", "--reps", "1", "--seed", "5"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("scenario,method,rate,se,mean_contrib_1,mean_contrib_2,mean_contrib_3,mean_angle")
    );
    let rows: Vec<Vec<String>> = lines.map(split_csv).collect();
    // 10 methods in the 20 three-sample scenarios, 10 in the 12 four-sample
    // ones, 11 in the 8 two-sample ones.
    assert_eq!(rows.len(), 20 * 10 + 12 * 10 + 8 * 11);
    let t5_blank_third = rows.iter().filter(|f| f[0].starts_with("T5-")).all(|f| f[6].is_empty());
    assert!(t5_blank_third, "bivariate scenarios must leave mean_contrib_3 blank");
    for fields in &rows {
        assert_eq!(fields.len(), 8, "row shape: {fields:?}");
        let rate: f64 = fields[2].parse().unwrap();
        assert!((0.0..=1.0).contains(&rate));
    }
}
