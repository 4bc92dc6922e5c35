use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ergopet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergopet")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn malformed_family_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.conf", "[experiment]\nkind = check-good\n\n[family]\np = 1/N^0.3*n\np = 1/N^0.6*n *\n");
    let out = ergopet(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 6, column 16"), "{err}");
}

#[test]
fn bad_flag_names_the_flag() {
    let out = ergopet(&["recurrence", "--system", "cyclic:M=x", "--set", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--system, column 10"));
}

#[test]
fn linear_pair_goodness_passes_with_default_grids() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("good.csv");
    let cfg = write(dir.path(), "good.conf", "[experiment]\nkind = check-good\n[family]\nfamily = 1/N^0.3*n; 1/N^0.6*n\n");
    let out = ergopet(&["--out", csv.to_str().unwrap(), "run", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("lambda,alpha,N,magnitude,verdict"));
    assert_eq!(lines.count(), 16 * 3 * 3);
}

#[test]
fn pet_trace_and_verdict_failures() {
    let out = ergopet(&["pet-reduce", "--family", "1/N^0.5*n^2; 1/N^0.5*n"]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("step=1 chose="), "{err}");
    assert!(err.contains("final k="));

    let out = ergopet(&["check-rk", "--coefficients", "1/N^0.3; 1/N^0.3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn recurrence_on_z4_is_exact() {
    let out = ergopet(&["recurrence", "--system", "cyclic:M=4", "--set", "0,1", "--iterates", "linear", "--ell", "1", "--N", "4", "--check", "bound"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8_lossy(&out.stdout);
    assert_eq!(csv.lines().nth(1), Some("4,0.25,4,16,0.5,0.25"));
}

#[test]
fn progressions_in_the_full_interval() {
    let out = ergopet(&["find-progressions", "--integers", "1..100", "--family", "1/N^0.5*n; 1/N^0.5*n^2", "--N-min", "100", "--N-max", "100"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn batch_runs_report_the_worst_code() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(dir.path(), "a.conf", "[experiment]\nkind = seminorm\n[system]\nspec = cyclic:M=2\nobservable = vec:1,-1\n");
    let fail = write(dir.path(), "b.conf", "[experiment]\nkind = check-rk\n[family]\ncoefficients = 1/N^0.3; 1/N^0.3\n");
    assert_eq!(ergopet(&["run", &ok]).status.code(), Some(0));
    assert_eq!(ergopet(&["run", &ok, &fail]).status.code(), Some(1));
}
