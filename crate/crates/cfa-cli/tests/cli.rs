//! Behavioral tests for the `cfa` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cfa"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn run_ok(args: &[&str]) -> Output {
    let output = bin().args(args).output().unwrap();
    assert!(
        output.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

#[test]
fn fuse_writes_the_full_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fusion.csv");
    run_ok(&[
        "fuse",
        "--input",
        data("sample_matrix.csv").to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    let report = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(
        lines[0],
        "subset,method,top_item,fused_value_of_top,fallback_flag"
    );
    assert_eq!(lines.len(), 105, "header + 26 subsets x 4 methods");
}

#[test]
fn fuse_min_size_one_appends_baselines() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fusion.csv");
    run_ok(&[
        "fuse",
        "--input",
        data("sample_matrix.csv").to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
        "--min-size",
        "1",
    ]);
    let report = std::fs::read_to_string(&out).unwrap();
    // 31 subsets (5 singletons + 26) x 4 methods.
    assert_eq!(report.lines().count(), 125);
    assert!(report.contains("\nauthority,ASC,"));
}

#[test]
fn diversity_writes_pairs_and_strengths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("div.csv");
    run_ok(&[
        "diversity",
        "--input",
        data("sample_matrix.csv").to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    let report = std::fs::read_to_string(&out).unwrap();
    assert!(report.starts_with("system_a,system_b,cd\n"));
    assert!(report.contains("\nsystem,ds\n"));
    // C(5,2) pair rows + 5 ds rows + 2 headers + blank.
    assert_eq!(report.lines().count(), 18);
}

#[test]
fn rsf_writes_one_row_per_rank() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rsf.csv");
    run_ok(&[
        "rsf",
        "--input",
        data("sample_matrix.csv").to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    let report = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines[0], "rank,authority,care,fairness,loyalty,sanctity");
    assert_eq!(lines.len(), 9, "header + 8 items");
    assert!(lines[1].starts_with("1,1,1,1,1,1"));
}

#[test]
fn kemeny_graph_three_prints_the_known_properties() {
    let output = run_ok(&["kemeny", "--graph", "3"]);
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert_eq!(
        stdout.lines().next().unwrap(),
        "6 vertices, 2-regular, connected, connectivity 2"
    );
}

#[test]
fn kemeny_graph_exports_an_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("edges.tsv");
    run_ok(&["kemeny", "--graph", "4", "--export", out.to_str().unwrap()]);
    let edges = std::fs::read_to_string(&out).unwrap();
    assert_eq!(edges.lines().count(), 36, "24 * 3 / 2 edges");
    assert!(edges.lines().all(|l| l.split('\t').count() == 2));
}

#[test]
fn kemeny_enumerate_counts_weak_orders() {
    let output = run_ok(&["kemeny", "--enumerate", "3"]);
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.starts_with("13 weak orders on 3 items"));
}

#[test]
fn kemeny_requires_a_mode() {
    let output = bin().arg("kemeny").output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn kemeny_rejects_oversized_graphs() {
    let output = bin().args(["kemeny", "--graph", "9"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1, "one-line diagnostic");
    assert!(stderr.contains("capped"));
}

#[test]
fn pipeline_writes_reports_and_respects_the_env_default() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args([
            "pipeline",
            "--corpus",
            data("toy_corpus.jsonl").to_str().unwrap(),
        ])
        .env("CFA_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(dir.path().join("summary.csv").exists());
    assert!(dir.path().join("curves/q_0001_rsf.csv").exists());
    assert_eq!(count_files(dir.path()), 21);
}

fn count_files(dir: &Path) -> usize {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            if path.is_dir() {
                count_files(&path)
            } else {
                1
            }
        })
        .sum()
}

#[test]
fn simulate_writes_the_study_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("study.csv");
    let output = run_ok(&[
        "simulate",
        "--trials",
        "20",
        "--output",
        out.to_str().unwrap(),
        "--no-normalize",
    ]);
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("ASC top-1 accuracy:"));
    let report = std::fs::read_to_string(&out).unwrap();
    assert!(report.starts_with("trial,method,hit,mean_cd\n"));
    assert!(report.contains("overall,WRCDS,"));
}

#[test]
fn simulate_validates_scale_lengths() {
    let output = bin()
        .args([
            "simulate",
            "--trials",
            "5",
            "--systems",
            "3",
            "--output",
            "/tmp/never_written.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn missing_input_is_a_data_error() {
    let output = bin()
        .args([
            "fuse",
            "--input",
            "/definitely/not/here.csv",
            "--output",
            "/tmp/out.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1);
    assert!(stderr.starts_with("error: "));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let output = bin().arg("nonsense").output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("Usage:"));
}

#[test]
fn help_is_available_per_subcommand() {
    for sub in ["fuse", "diversity", "rsf", "kemeny", "pipeline", "simulate"] {
        let output = bin().args([sub, "--help"]).output().unwrap();
        assert!(output.status.success(), "{sub} --help");
    }
}
