//! End-to-end checks of the command-line surface.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toric-sarkisov"))
}

fn write_tmp(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("toric-sarkisov-test-{name}"));
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

const QUOTIENT: &str = "3 4\n0 1 1\n-1 0 -2\n-1 -2 1\n2 1 0\n";

#[test]
fn check_reports_the_quotient_space() {
    let file = write_tmp("quotient.fan", QUOTIENT);
    let out = run(&["check", file.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("terminal"));
    assert!(text.contains("weights (1,1,1,1)"));
    assert!(text.contains("discriminant Z/5"));
}

#[test]
fn empty_file_is_a_parse_error_with_exit_2() {
    let file = write_tmp("empty.fan", "");
    let out = run(&["check", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_file_reports_line_number() {
    let file = write_tmp("bad.fan", "3 4\n1 0 0\n0 1 oops\n");
    let out = run(&["check", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3"), "stderr: {err}");
}

#[test]
fn link_from_the_kawamata_point() {
    let file = write_tmp("quotient-link.fan", QUOTIENT);
    let out = run(&["link", file.to_str().unwrap(), "--point", "1,1,0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("flip (5,1,-1,-2)"), "stdout: {text}");
    assert!(text.contains("P(1,2,3,5)"));
}

#[test]
fn link_jsonl_round_trips() {
    let file = write_tmp("quotient-jsonl.fan", QUOTIENT);
    let out = run(&["link", file.to_str().unwrap(), "--all", "--dmax", "1", "--format", "jsonl"]);
    assert!(out.status.success());
    for line in String::from_utf8(out.stdout).unwrap().lines() {
        let _: toric_sarkisov::link::LinkRecord = serde_json::from_str(line).unwrap();
    }
}

#[test]
fn shed_svg_writes_atomically() {
    let file = write_tmp("shed.fan", QUOTIENT);
    let out_path = std::env::temp_dir().join("toric-sarkisov-test-shed.svg");
    let _ = std::fs::remove_file(&out_path);
    let out = run(&["shed-svg", file.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(&out_path).unwrap();
    assert!(svg.starts_with("<svg"));

    // a failing render must not leave a file behind
    let p4 = write_tmp("shed4.fan", "4 5\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n-1 -1 -1 -1\n");
    let missing = std::env::temp_dir().join("toric-sarkisov-test-shed4.svg");
    let _ = std::fs::remove_file(&missing);
    let out = run(&["shed-svg", p4.to_str().unwrap(), "--out", missing.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(!missing.exists(), "no partial output on failure");
}

#[test]
fn verify4_flags_a_bad_dataset() {
    let good = write_tmp("ds-good.fan", &format!("{QUOTIENT}\n3 4\n1 0 0\n0 1 0\n0 0 1\n-1 -1 -1\n"));
    assert!(run(&["verify4", good.to_str().unwrap()]).status.success());
    let bad = write_tmp("ds-bad.fan", &format!("{QUOTIENT}\n{QUOTIENT}"));
    let out = run(&["verify4", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("duplicate"));
}
