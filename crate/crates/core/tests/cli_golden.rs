//! Runs the built binary against the reference systems and compares full
//! transcripts with the checked-in golden files.

mod common;

use std::process::Command;

use common::{golden_path, system_path, transcript, GOLDEN};

fn run_binary(sub: &str, path: &str, flags: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_dsff")).arg(sub).arg(path).args(flags).output().unwrap();
    transcript(
        &String::from_utf8(out.stdout).unwrap(),
        &String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap(),
    )
}

#[test]
fn transcripts_match_golden_files() {
    for &(name, label, sub, flags) in GOLDEN {
        let expected = std::fs::read_to_string(golden_path(name, label)).unwrap();
        let got = run_binary(sub, &system_path(name), flags);
        assert_eq!(got, expected, "{name}-{label}");
    }
}

#[test]
fn repeated_runs_are_identical() {
    for &(name, _, sub, flags) in GOLDEN {
        let path = system_path(name);
        assert_eq!(run_binary(sub, &path, flags), run_binary(sub, &path, flags));
    }
}

#[test]
fn missing_file_is_an_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_dsff")).args(["analyze", "no/such/system.dsff"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error: cannot read"));
}

#[test]
fn table_form_reference_matches_expression_form() {
    let table = "field p=2 m=1\nvars n=2\ntable transition:\n0,0 -> 0,0\n1,0 -> 0,1\n0,1 -> 1,1\n1,1 -> 1,0\n\
                 table output:\n0,0 -> 0\n1,0 -> 1\n0,1 -> 0\n1,1 -> 1\n";
    let expr = std::fs::read_to_string(system_path("lfsr")).unwrap();
    assert_eq!(dsff::specfile::load_system(table).unwrap(), dsff::specfile::load_system(&expr).unwrap());
}
