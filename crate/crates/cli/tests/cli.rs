use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use clap::Parser;
use maxshare_cli::{run, Cli};

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    path.display().to_string()
}

fn maxshare(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_maxshare"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .expect("piped stdin")
        .write_all(stdin.as_bytes())
        .expect("stdin accepts input");
    child.wait_with_output().expect("binary finishes")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn compacts_the_unrolled_fixed_point() {
    let out = maxshare(&["maxshare", &fixture("fix-unrolled.lam")], "");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "\\x0. let f0 = x0 f0 in f0\n");
}

#[test]
fn shares_duplicated_identity() {
    let out = maxshare(&["maxshare", &fixture("id-id.lam")], "");
    assert_eq!(stdout(&out), "let f0 = \\x1. x1 in f0 f0\n");
}

#[test]
fn variable_unsharing_can_be_disabled() {
    let out = maxshare(&["maxshare", "--unshare-vars", "false"], r"\x. x x");
    assert_eq!(stdout(&out), "\\x0. let f0 = x0 in f0 f0\n");
    let out = maxshare(&["maxshare"], r"\x. x x");
    assert_eq!(stdout(&out), "\\x0. x0 x0\n");
}

#[test]
fn equivalence_verdicts_set_the_exit_code() {
    let out = maxshare(
        &[
            "equiv",
            &fixture("counter.lam"),
            &fixture("counter-nested.lam"),
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "not equivalent\n");
    let out = maxshare(
        &[
            "equiv",
            &fixture("counter-redex.lam"),
            &fixture("counter.lam"),
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "equivalent\n");
}

#[test]
fn equiv_reads_one_side_from_stdin() {
    let out = maxshare(
        &["equiv", "-", &fixture("fix-unrolled.lam")],
        r"\g. let s = g s in s",
    );
    assert_eq!(stdout(&out), "equivalent\n");
}

#[test]
fn unfolds_a_black_hole() {
    let out = maxshare(&["unfold", "--depth", "2", &fixture("black-hole.lam")], "");
    assert_eq!(stdout(&out), "\\x. _|_ x\n");
}

#[test]
fn show_and_gc() {
    let out = maxshare(&["show"], r"\x.let f = x, g = g in f");
    assert_eq!(stdout(&out), "\\x. let f = x, g = g in f\n");
    let out = maxshare(&["gc"], r"\x.let f = x, g = g in f");
    assert_eq!(stdout(&out), "\\x. let f = x in f\n");
}

#[test]
fn graph_commands() {
    let out = maxshare(&["translate", "--semantics", "min"], r"\x. x");
    assert_eq!(stdout(&out), "0: LAM -> 1\n1: VAR0 -> 0\n");
    let out = maxshare(&["collapse", &fixture("fix-unrolled.lam")], "");
    assert_eq!(stdout(&out), "0: LAM -> 1\n1: APP -> 2,1\n2: VAR0 -> 0\n");
    let out = maxshare(&["dot"], r"\x. x");
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph"));
    assert!(dot.trim_end().ends_with('}'));
}

#[test]
fn parse_errors_exit_with_two() {
    let out = maxshare(&["show", &fixture("broken.lam")], "");
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("broken.lam"), "{err}");
    let out = maxshare(&["translate", "--semantics", "huge"], r"\x. x");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_files_are_reported() {
    let out = maxshare(&["show", "no/such/file.lam"], "");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}

#[test]
fn output_goes_to_the_named_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.txt");
    let out = maxshare(
        &[
            "-o",
            path.to_str().unwrap(),
            "maxshare",
            &fixture("fix-unrolled.lam"),
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        "\\x0. let f0 = x0 f0 in f0\n"
    );
}

#[test]
fn output_is_deterministic() {
    for cmd in ["maxshare", "translate", "collapse", "dot"] {
        let a = maxshare(&[cmd, &fixture("counter-redex.lam")], "");
        let b = maxshare(&[cmd, &fixture("counter-redex.lam")], "");
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn compacted_output_stays_equivalent() {
    for name in [
        "fix-unrolled.lam",
        "counter-redex.lam",
        "counter-nested.lam",
        "black-hole.lam",
        "id-id.lam",
    ] {
        let cli = Cli::try_parse_from(["maxshare", "maxshare", &fixture(name)]).unwrap();
        let compact = run(&cli, &mut std::io::empty()).unwrap().text;
        let cli = Cli::try_parse_from(["maxshare", "equiv", "-", &fixture(name)]).unwrap();
        let report = run(&cli, &mut compact.as_bytes()).unwrap();
        assert_eq!(report.code, 0, "{name}: {compact}");
    }
}

#[test]
fn invariant_violations_exit_with_three() {
    use maxshare_cli::CliError;
    use maxshare_core::fograph::Clause;
    use maxshare_core::{GraphError, VertexId};
    let e = CliError::Graph(GraphError::NotALambdaTermGraph {
        vertex: VertexId(0),
        clause: Clause::Root,
    });
    assert_eq!(e.exit_code(), 3);
    assert!(e.to_string().starts_with("internal invariant violated"));
}
