use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use diarscore::formats::parse_htk_lab;
use diarscore::reporting::{read_csv_rows, ScoreReport};

const EXPECTED_TABLE: &str = "\
File          DER       JER        FA      MISS     ERROR     TOTAL     FILES       REF       SYS
-------------------------------------------------------------------------------------------------
f1          20.00     20.00      0.00      2.00      0.00     10.00         1         1         1
f2          33.33     50.00      0.00      5.00      0.00     15.00         1         2         1
-------------------------------------------------------------------------------------------------
OVERALL     28.00     40.00      0.00      7.00      0.00     25.00         2         3         2
";

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn diarscore(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diarscore"))
        .current_dir(fixture(""))
        .args(args)
        .env_remove("DIARSCORE_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const SCORE: [&str; 8] = ["score", "-u", "all.uem", "-r", "ref1.rttm", "ref2.rttm", "-s", "sys1.rttm"];

fn score_args(extra: &[&'static str]) -> Vec<&'static str> {
    let mut v = SCORE.to_vec();
    v.push("sys2.rttm");
    v.extend_from_slice(extra);
    v
}

#[test]
fn score_prints_expected_table() {
    let out = diarscore(&score_args(&[]));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), EXPECTED_TABLE);
}

#[test]
fn file_order_on_command_line_does_not_matter() {
    let out = diarscore(&["score", "-u", "all.uem", "-r", "ref2.rttm", "ref1.rttm", "-s", "sys2.rttm", "sys1.rttm"]);
    assert_eq!(stdout(&out), EXPECTED_TABLE);
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let first = diarscore(&score_args(&["--format", "json"]));
    let second = Command::new(env!("CARGO_BIN_EXE_diarscore"))
        .current_dir(fixture(""))
        .args(score_args(&["--format", "json"]))
        .env("DIARSCORE_JOBS", "1")
        .output()
        .unwrap();
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn json_replaces_table() {
    let out = diarscore(&score_args(&["--format", "json"]));
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(!text.contains("-----"));
    let report = ScoreReport::from_json(&text).unwrap();
    assert_eq!(report.files.len(), 2);
    let overall = report.overall.unwrap();
    assert!((overall.der - 28.0).abs() < 1e-9);
    assert!((overall.jer - 40.0).abs() < 1e-9);
    assert_eq!(report.metadata.uem.as_deref(), Some("all.uem"));
}

#[test]
fn csv_with_core_rows() {
    let out = diarscore(&score_args(&["--format", "csv", "--manifest", "manifest.txt"]));
    assert_eq!(out.status.code(), Some(0));
    let rows = read_csv_rows(&stdout(&out)).unwrap();
    let ids: Vec<&str> = rows.iter().map(|r| r.file_id.as_str()).collect();
    assert_eq!(ids, ["f1", "f2", "OVERALL", "CORE-OVERALL"]);
    assert!((rows[3].der - 20.0).abs() < 1e-9);
}

#[test]
fn missing_system_file_is_scoring_failure() {
    let out = diarscore(&SCORE);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("f2"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_uem_entry_is_scoring_failure() {
    let dir = tempfile::tempdir().unwrap();
    let uem = dir.path().join("partial.uem");
    std::fs::write(&uem, "f1 1 0 20\n").unwrap();
    let out = diarscore(
        &score_args(&[])
            .into_iter()
            .map(|a| if a == "all.uem" { uem.to_str().unwrap() } else { a })
            .collect::<Vec<_>>(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreadable_or_malformed_input_exits_one() {
    let out = diarscore(&["score", "-r", "nope.rttm", "-s", "sys1.rttm"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("nope.rttm"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.rttm");
    std::fs::write(&bad, "SPEAKER f1 1 0 1 <NA> <NA> a <NA>\n").unwrap();
    let out = diarscore(&["score", "-r", bad.to_str().unwrap(), "-s", "sys1.rttm"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(diarscore(&["score"]).status.code(), Some(1));
    assert_eq!(diarscore(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(diarscore(&["--help"]).status.code(), Some(0));
    assert_eq!(diarscore(&["--version"]).status.code(), Some(0));
}

#[test]
fn strict_mode_rules() {
    let out = diarscore(&["score", "--strict", "-r", "ref1.rttm", "-s", "sys1.rttm"]);
    assert_eq!(out.status.code(), Some(1));
    let out = diarscore(&score_args(&["--strict", "--collar", "0.25"]));
    assert_eq!(out.status.code(), Some(1));
    let out = diarscore(&score_args(&["--strict"]));
    assert_eq!(stdout(&out), EXPECTED_TABLE);
}

#[test]
fn collar_warns_and_lowers_total() {
    let out = diarscore(&score_args(&["--collar", "0.5", "--format", "json"]));
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("collar"));
    let report = ScoreReport::from_json(&stdout(&out)).unwrap();
    assert!(report.overall.unwrap().total < 25.0);
}

#[test]
fn validate_exit_codes() {
    let ok = diarscore(&["validate", "--manifest", "manifest.txt", "-s", "sys1.rttm", "sys2.rttm", "-u", "all.uem"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("VALID"));

    let missing = diarscore(&["validate", "--manifest", "manifest.txt", "-s", "sys1.rttm"]);
    assert_eq!(missing.status.code(), Some(3));
    assert!(stdout(&missing).contains("f2"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("f2.rttm");
    std::fs::write(&bad, "SPEAKER f2 1 0 1 <NA> <NA> a <NA> <NA>\nSPEAKER f2 1 x 1 <NA> <NA> a <NA> <NA>\n").unwrap();
    let malformed = diarscore(&["validate", "--manifest", "manifest.txt", "-s", "sys1.rttm", bad.to_str().unwrap()]);
    assert_eq!(malformed.status.code(), Some(3));
    assert!(stdout(&malformed).contains("f2.rttm:2"), "{}", stdout(&malformed));

    let io = diarscore(&["validate", "--manifest", "absent.txt", "-s", "sys1.rttm"]);
    assert_eq!(io.status.code(), Some(1));
}

#[test]
fn derive_sad_writes_label_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = diarscore(&["derive-sad", "-r", "ref1.rttm", "ref2.rttm", "-o", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for (id, want) in [("f1", "0.0000 10.0000 speech\n"), ("f2", "0.0000 10.0000 speech\n")] {
        let text = std::fs::read_to_string(dir.path().join(format!("{id}.lab"))).unwrap();
        assert_eq!(text, want);
        assert_eq!(parse_htk_lab(&text).unwrap().len(), 1);
    }
    let neg = diarscore(&["derive-sad", "-r", "ref1.rttm", "-o", dir.path().to_str().unwrap(), "--max-gap", "-1"]);
    assert_eq!(neg.status.code(), Some(1));
}
