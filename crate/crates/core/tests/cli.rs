mod common;

use std::io::Write;
use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use common::corpus_file;

fn refine(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_refine"))
        .args(args)
        .output()
        .expect("run refine")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn corpus(name: &str) -> String {
    corpus_file(name).display().to_string()
}

fn have_solver() -> bool {
    refine_core::solver::SolverConfig::discover(None).is_some()
}

/// Writes an executable shell script standing in for a solver.
fn fake_solver(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("fake-solver");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "#!/bin/sh\n{body}").unwrap();
    drop(f);
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    path
}

fn source_file(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn verified_file_exits_zero() {
    if !have_solver() {
        return;
    }
    let o = refine(&["check", &corpus("pred.rfn")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("2 VCs, 2 valid"), "{}", stdout(&o));
}

#[test]
fn narrowing_reports_counterexample() {
    if !have_solver() {
        return;
    }
    let o = refine(&["check", &corpus("bad_widen.rfn")]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("bad_widen.rfn:4:50: refinement not provable: x < n\n"), "{s}");
    assert!(s.contains("  counterexample: n = 0, x = 0\n"), "{s}");
}

#[test]
fn wrong_literal_counterexample_names_the_witness() {
    if !have_solver() {
        return;
    }
    let o = refine(&["check", &corpus("wrong_literal.rfn")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample: v = 2"));
}

#[test]
fn no_files_is_a_usage_error() {
    let o = refine(&["check"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn oracle_mode_never_spawns_a_solver() {
    let dir = tempfile::tempdir().unwrap();
    let marker = dir.path().join("spawned");
    let solver = fake_solver(dir.path(), &format!("touch {}\necho unsat", marker.display()));
    let solver = solver.display().to_string();
    let o = refine(&["check", "--no-solver", "--solver", &solver, &corpus("pred.rfn")]);
    assert_eq!(o.status.code(), Some(0));
    let o = refine(&["check", "--no-solver", "--oracle-bound", "5", &corpus("bad_widen.rfn")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample: n = 0, x = 0"));
    assert!(!marker.exists());
}

#[test]
fn timeout_is_unknown_and_bounded_in_time() {
    let dir = tempfile::tempdir().unwrap();
    let solver = fake_solver(dir.path(), "sleep 30");
    let start = Instant::now();
    let o = refine(&[
        "check",
        "--solver",
        &solver.display().to_string(),
        "--timeout",
        "200",
        &corpus("fin_widen.rfn"),
    ]);
    assert!(start.elapsed() < Duration::from_secs(10));
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("  verdict: unknown (timeout)\n"), "{}", stdout(&o));
}

#[test]
fn solver_unknown_and_garbage_are_unknown() {
    let dir = tempfile::tempdir().unwrap();
    let solver = fake_solver(dir.path(), "cat > /dev/null; echo unknown");
    let o = refine(&["check", "--solver", &solver.display().to_string(), &corpus("fin_widen.rfn")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("verdict: unknown (solver-said-unknown)"));

    let solver = fake_solver(dir.path(), "cat > /dev/null; echo 'what?'");
    let o = refine(&["check", "--solver", &solver.display().to_string(), &corpus("fin_widen.rfn")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("verdict: unknown (solver-error("), "{}", stdout(&o));

    let solver = fake_solver(dir.path(), "cat > /dev/null; echo sat; echo '((define-fun n () Int'");
    let o = refine(&["check", "--solver", &solver.display().to_string(), &corpus("fin_widen.rfn")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_solver_is_an_infrastructure_error() {
    let o = refine(&["check", "--solver", "/nonexistent/solver", &corpus("fin_widen.rfn")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("solver-error("));
}

#[test]
fn environment_variable_selects_the_solver() {
    let dir = tempfile::tempdir().unwrap();
    let solver = fake_solver(dir.path(), "cat > /dev/null; echo unsat");
    let o = Command::new(env!("CARGO_BIN_EXE_refine"))
        .args(["check", &corpus("bad_widen.rfn")])
        .env("REFINE_SOLVER", &solver)
        .output()
        .unwrap();
    // the stand-in claims everything is valid
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_refine"))
        .args(["check", "--solver", "/nonexistent/solver", &corpus("bad_widen.rfn")])
        .env("REFINE_SOLVER", &solver)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn syntax_and_type_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = source_file(dir.path(), "bad.rfn", "val x : Nat 3");
    let o = refine(&["check", "--no-solver", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("bad.rfn:1:13: syntax error:"), "{}", stdout(&o));

    let ill = source_file(dir.path(), "ill.rfn", "val x : Nat = true\nval y : Nat = z");
    let o = refine(&["check", "--no-solver", &ill]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("ill.rfn:1:15: error: type mismatch"), "{s}");
    assert!(s.contains("ill.rfn:2:15: error: unbound variable `z`"), "{s}");

    let cyc = source_file(dir.path(), "cyc.rfn", "type A = B\ntype B = A\nval x : A = 1");
    let o = refine(&["check", "--no-solver", &cyc]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unreadable_file_exits_two() {
    let o = refine(&["check", "--no-solver", "/nonexistent/file.rfn"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("cannot read file"));
}

#[test]
fn invalid_dominates_unknown() {
    let dir = tempfile::tempdir().unwrap();
    let solver = fake_solver(
        dir.path(),
        "input=$(cat)\ncase \"$input\" in *'(declare-const v Int)'*) echo sat; echo '((define-fun v () Int 2))';; *) echo unknown;; esac",
    );
    let o = refine(&[
        "check",
        "--solver",
        &solver.display().to_string(),
        &corpus("fin_widen.rfn"),
        &corpus("wrong_literal.rfn"),
    ]);
    let s = stdout(&o);
    assert!(s.contains("verdict: unknown"), "{s}");
    assert!(s.contains("counterexample: v = 2"), "{s}");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dump_files_are_named_per_vc() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    let o = refine(&["check", "--no-solver", "--dump-smt", &d, &corpus("pred.rfn")]);
    assert_eq!(o.status.code(), Some(0));
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["pred.vc1.smt2", "pred.vc2.smt2"]);
    let text = std::fs::read_to_string(dir.path().join("pred.vc2.smt2")).unwrap();
    assert!(text.starts_with("(set-logic QF_LIA)\n"));
    assert!(text.ends_with("(check-sat)\n(get-model)\n"));
}

#[test]
fn run_evaluates_verified_programs_only() {
    let o = refine(&["check", "--no-solver", &corpus("pred.rfn"), "--run", "pred", "5", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("pred(5, 3) = 2 [3 steps"), "{}", stdout(&o));

    let o = refine(&["check", "--no-solver", &corpus("bad_widen.rfn"), "--run", "narrow", "1", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not running `narrow`"));

    let o = refine(&["check", "--no-solver", &corpus("pred.rfn"), "--run", "pred", "x"]);
    assert_eq!(o.status.code(), Some(2));

    let o = refine(&["check", "--no-solver", &corpus("pred.rfn"), "--run", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("evaluation failed"));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(refine(&["--help"]).status.code(), Some(0));
    assert_eq!(refine(&["--version"]).status.code(), Some(0));
    assert_eq!(refine(&["check", "--help"]).status.code(), Some(0));
}

#[test]
fn parallel_jobs_keep_source_order() {
    if !have_solver() {
        return;
    }
    let a = refine(&["check", &corpus("arith.rfn"), &corpus("bad_widen.rfn")]);
    let b = refine(&["check", "--jobs", "4", &corpus("arith.rfn"), &corpus("bad_widen.rfn")]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}
