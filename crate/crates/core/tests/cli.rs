//! End-to-end tests of the command-line binary: output formats, config
//! files, report round trips and exit codes.

use std::process::{Command, Output};

use orbitcount::report::{Report, ReportBody};
use orbitcount::solver::Verdict;

fn orbitcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitcount")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_reports_round_trip() {
    let o = orbitcount(&["verify", "--family", "LINFRAC_SPECIAL", "--params", "a=2,b=3", "--n-range", "1..3"]);
    assert_eq!(o.status.code(), Some(0));
    let r = Report::from_json(&stdout(&o)).unwrap();
    assert!(r.timestamp.is_some());
    let ReportBody::Verify(v) = &r.body else { panic!("verify body") };
    assert_eq!(v.rows.iter().map(|row| row.found_distinct).collect::<Vec<_>>(), vec![2, 4, 5]);
    assert!(v.rows.iter().all(|row| row.verdict == Verdict::Match));
    assert_eq!(Report::from_json(&r.to_json().unwrap()).unwrap(), r);
}

#[test]
fn every_command_emits_a_parseable_report() {
    for cmd in ["degrees", "analyze", "predict", "census", "verify"] {
        let o = orbitcount(&[cmd, "--family", "SI_MODEL", "--params", "alpha=2", "--n", "2", "--seed", "3"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        Report::from_json(&stdout(&o)).unwrap();
    }
}

#[test]
fn config_file_with_flag_override_and_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"command": "census", "family": "RATIONAL_PLANAR", "params": {"a": "2", "b": "3", "c": "5", "d": "7"}, "n": 3, "seed": 1}"#).unwrap();
    let out = dir.path().join("points.csv");
    let o = orbitcount(&["census", "--config", cfg.to_str().unwrap(), "--n", "1", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header = rows.headers().unwrap().clone();
    assert!(header.iter().any(|h| h == "residual"), "{header:?}");
    assert_eq!(rows.records().count(), 4);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| orbitcount(args).status.code();
    assert_eq!(code(&["predict", "--family", "NO_SUCH_FAMILY"]), Some(2));
    assert_eq!(code(&["predict", "--family", "SI_MODEL", "--params", "alpha=0"]), Some(2));
    assert_eq!(code(&["predict", "--family", "SI_MODEL", "--params", "alpha=2,zeta=1"]), Some(2));
    assert_eq!(code(&["degrees", "--family", "SI_MODEL", "--params", "alpha=2", "--n", "30"]), Some(2));
    assert_eq!(code(&["degrees", "--family", "LINFRAC_GENERAL", "--params", "a0=1,a1=2,a2=3,b0=5,b1=7,b2=11", "--n", "12"]), Some(3));
    // A MISMATCH verdict is still a successful run.
    assert_eq!(code(&["verify", "--family", "LINFRAC_GENERAL", "--params", "a0=1,a1=2,a2=3,b0=5,b1=7,b2=11", "--n", "2"]), Some(0));
}

#[test]
fn same_config_gives_identical_reports() {
    let args = ["analyze", "--family", "COMPETITIVE", "--params", "alpha=2,beta=3,a0=1,a1=2,a2=3,b0=5,b1=-7,b2=4", "--seed", "8"];
    let strip = |s: String| s.lines().filter(|l| !l.contains("\"timestamp\"")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(stdout(&orbitcount(&args))), strip(stdout(&orbitcount(&args))));
}
