//! End-to-end checks of the binary: exit codes, output files, and manifest
//! stability. Small grids keep these fast; the statistical checks live in
//! the acceptance suite.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_riskpool"))
}

fn write(path: &Path, body: &str) {
    std::fs::write(path, body).unwrap();
}

const SMALL_RATIO: &str = r#"
kind = "ratio"
seed = 7
n_grid = [50, 100, 200]
replications = 200

[marginal]
family = "bernoulli"
p = 0.1

[weights]
scheme = "constant"

[measure]
kind = "es"
alpha = 0.95
"#;

#[test]
fn ratio_run_writes_expected_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("ratio.toml");
    write(&config, SMALL_RATIO);
    let out_dir = dir.path().join("out");
    let output = bin()
        .args([
            "ratio",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));

    let results = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    let mut lines = results.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,total_weight,estimate,mc_stderr,target,abs_error"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3, "one row per grid point");
    for row in &rows {
        // ES(0.95)/bernoulli(0.1) ratio target is exactly 10
        assert_eq!(row.split(',').nth(4).unwrap(), "10");
    }

    let plot = std::fs::read_to_string(out_dir.join("plotdata.csv")).unwrap();
    assert!(plot.starts_with("n,estimate,target\n"));
    assert_eq!(plot.lines().count(), 4);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["kind"], "ratio");
    assert_eq!(summary["manifest"]["master_seed"], 7);
    assert!(summary["manifest"]["config_digest"].as_str().unwrap().len() == 64);
    assert!(summary["verdict"].is_string());
}

#[test]
fn reruns_are_byte_identical_and_seed_override_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("ratio.toml");
    write(&config, SMALL_RATIO);
    let run = |out: &Path, seed: Option<&str>| {
        let mut cmd = bin();
        cmd.args([
            "ratio",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        if let Some(s) = seed {
            cmd.args(["--seed", s]);
        }
        assert!(cmd.output().unwrap().status.success());
        std::fs::read(out.join("results.csv")).unwrap()
    };
    let a = run(&dir.path().join("a"), None);
    let b = run(&dir.path().join("b"), None);
    assert_eq!(a, b, "same manifest must give identical bytes");
    let c = run(&dir.path().join("c"), Some("8"));
    assert_ne!(a, c, "seed override must change the estimates");
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    let out = dir.path().join("out");

    // unknown top-level key
    write(&config, &format!("{SMALL_RATIO}\nbogus = 3\n"));
    let output = bin()
        .args(["ratio", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));

    // out-of-range probability
    write(&config, &SMALL_RATIO.replace("p = 0.1", "p = 1.2"));
    let output = bin()
        .args(["ratio", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("(0,1)"), "diagnostic names the range: {stderr}");

    // kind/subcommand mismatch
    write(&config, SMALL_RATIO);
    let output = bin()
        .args(["uel", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));

    // missing file
    let output = bin()
        .args(["ratio", "--config", "/nonexistent.toml", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn uel_with_divergent_mean_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("uel.toml");
    write(
        &config,
        r#"
kind = "uel"
seed = 7
n_grid = [50, 100]
replications = 200

[marginal]
family = "pareto"
tail = 0.9
scale = 1.0

[weights]
scheme = "constant"

[measure]
kind = "mean"
"#,
    );
    let output = bin()
        .args([
            "uel",
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("diverges"), "stderr: {stderr}");
}

#[test]
fn worst_case_var_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("wc.toml");
    write(
        &config,
        r#"
kind = "worst-case"
seed = 7
n_grid = [50, 100]
replications = 200

[marginal]
family = "exponential"
rate = 1.0

[weights]
scheme = "constant"

[measure]
kind = "var"
alpha = 0.95
"#,
    );
    let output = bin()
        .args([
            "worst-case",
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn diagnostics_writes_csv_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("diag.toml");
    write(
        &config,
        r#"
kind = "diagnostics"
seed = 7
n_grid = [50, 200]
replications = 300

[marginal]
family = "bernoulli"
p = 0.1

[weights]
scheme = "geometric"
r = 2.0

[young]
family = "exp-minus-one"
"#,
    );
    let out_dir = dir.path().join("out");
    let output = bin()
        .args([
            "diagnostics",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let csv = std::fs::read_to_string(out_dir.join("diagnostics.csv")).unwrap();
    assert!(csv.starts_with("n,total_weight,toeplitz,wlln_tail,dvp_stat,moment_estimate\n"));
    assert_eq!(csv.lines().count(), 3);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    let flags = summary["flags"].as_array().unwrap();
    assert!(flags.iter().any(|f| f["flag"] == "toeplitz-non-vanishing"));
    assert!(flags.iter().any(|f| f["flag"] == "delta2-violation"));
}

#[test]
fn dump_samples_writes_one_column_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("ratio.toml");
    write(&config, SMALL_RATIO);
    let out_dir = dir.path().join("out");
    let output = bin()
        .args([
            "ratio",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--dump-samples",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    for n in [50, 100, 200] {
        let dump = std::fs::read_to_string(out_dir.join(format!("sample_n{n}.csv"))).unwrap();
        assert!(dump.starts_with("value\n"));
        assert_eq!(dump.lines().count(), 201, "header plus one row per replication");
    }
}

#[test]
fn config_digest_is_stable_under_key_reordering() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.toml");
    let b = dir.path().join("b.toml");
    write(&a, SMALL_RATIO);
    // same content, keys and tables permuted
    write(
        &b,
        r#"
replications = 200
n_grid = [50, 100, 200]
seed = 7
kind = "ratio"

[measure]
alpha = 0.95
kind = "es"

[weights]
scheme = "constant"

[marginal]
p = 0.1
family = "bernoulli"
"#,
    );
    let da = riskpool::cli::parse_config(&a).unwrap().digest();
    let db = riskpool::cli::parse_config(&b).unwrap().digest();
    assert_eq!(da, db);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        riskpool::cli::parse_config(&path)
            .unwrap_or_else(|e| panic!("{} does not parse: {e}", path.display()));
        seen += 1;
    }
    assert!(seen >= 10, "expected the shipped config set, found {seen}");
}

#[test]
fn selftest_exits_0_and_reports_pass_counts() {
    let output = bin().arg("selftest").output().unwrap();
    assert_eq!(
        output.status.code(),
        Some(0),
        "stdout: {}",
        String::from_utf8_lossy(&output.stdout)
    );
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("checks passed"));
    assert!(!stdout.contains("FAIL"));
}
