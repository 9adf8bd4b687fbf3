use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sstforge")).args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_sstforge"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn eval_last_letter() {
    let o = run(&["eval", &fixture("last-letter.asst.json"), "a a b"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "b b b\n"));
    let o = run(&["eval", &fixture("last-letter.asst.json"), ""]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "\n"));
}

#[test]
fn eval_swap_bimachine_and_async() {
    for f in ["swap.bim.json", "swap.async.json"] {
        let o = run(&["eval", &fixture(f), "a b a b"]);
        assert_eq!((code(&o), stdout(&o).as_str()), (0, "b b a a\n"), "{f}");
    }
}

#[test]
fn eval_errors_and_domain_miss() {
    assert_eq!(code(&run(&["eval", &fixture("last-letter.asst.json"), "a c"])), 2);
    assert_eq!(code(&run(&["eval", "/nonexistent.json", "a"])), 2);
    assert_eq!(code(&run(&["eval", &fixture("k3.graph.json"), "a"])), 2);
    let o = run(&["eval", &fixture("last-letter-partial.asst.json"), "b a"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (3, "DOMAIN-MISS\n"));
    let o = run(&["eval", &fixture("last-letter-partial.asst.json"), "a b"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "b b\n"));
}

#[test]
fn convert_sizes_and_round_trip() {
    let o = run(&["convert", &fixture("last-letter.asst.json"), "--to", "async-bimachine"]);
    assert_eq!(code(&o), 0);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("2 left, 2 right"), "{err}");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("last-letter.async.json");
    std::fs::write(&path, &o.stdout).unwrap();
    let back = run(&["eval", path.to_str().unwrap(), "a b b a"]);
    assert_eq!(stdout(&back), "a a a a\n");

    let o = run(&["convert", &fixture("swap.bim.json"), "--to", "asst"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("asst: 3 states, 3 registers"));
    let o2 = run_stdin(&["eval", "-", "a b a b"], &o.stdout);
    assert_eq!(stdout(&o2), "b b a a\n");
}

#[test]
fn convert_dependent_flows_is_unsupported() {
    assert_eq!(code(&run(&["convert", &fixture("last-letter.asst.json"), "--to", "bimachine"])), 4);
    assert_eq!(code(&run(&["convert", &fixture("k3.graph.json"), "--to", "asst"])), 4);
}

#[test]
fn check_predicates() {
    let o = run(&["check", &fixture("last-letter.asst.json"), "--predicate", "iffo"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("false\n"));
    assert_eq!(code(&run(&["check", &fixture("last-letter-iffo.asst.json"), "--predicate", "iffo"])), 0);
    assert_eq!(code(&run(&["check", &fixture("last-letter.asst.json"), "--predicate", "total-domain"])), 0);

    let o = run(&["check", &fixture("last-letter-partial.asst.json"), "--predicate", "total-domain"]);
    assert_eq!(code(&o), 1);
    let witness: serde_json::Value = serde_json::from_str(stdout(&o).lines().nth(1).unwrap()).unwrap();
    assert!(witness.get("state").is_some() && witness.get("register").is_some());

    assert_eq!(code(&run(&["check", &fixture("last-letter.fst.json"), "--predicate", "functional:5"])), 0);
    assert_eq!(code(&run(&["check", &fixture("three-state.pc.json"), "--predicate", "precongruence"])), 0);
    assert_eq!(code(&run(&["check", &fixture("last-letter.asst.json"), "--predicate", "nonsense"])), 2);
}

#[test]
fn check_rejects_unclosed_relation() {
    let text = std::fs::read_to_string(fixture("three-state.pc.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["payload"]["compatible_pairs"] = serde_json::json!([["q1", "q2"]]);
    let o = run_stdin(&["check", "-", "--predicate", "precongruence"], v.to_string().as_bytes());
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn minrefine_three_state_instance() {
    let o = run(&["minrefine", &fixture("three-state.pc.json")]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("k_min 2"));
    let witnesses: Vec<serde_json::Value> = lines.map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(witnesses.len() >= 2);
    assert!(witnesses.iter().all(|w| w["kind"] == "dfa"));

    let o = run(&["minrefine", &fixture("three-state.pc.json"), "--k", "1"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (1, "NONE\n"));
}

#[test]
fn coloring_then_faregmin() {
    let o = run(&["coloring", &fixture("k3.graph.json")]);
    assert_eq!(code(&o), 0);
    let machine = o.stdout;
    // K3 admits a 4-register solution (one shared scratch register plus
    // one per vertex), so the frontier sits between 3 and 4.
    for (k, expect) in [(3, 1), (4, 0), (6, 0)] {
        let o = run_stdin(&["faregmin", "-", "--k", &k.to_string()], &machine);
        assert_eq!(code(&o), expect, "k={k}: {}", String::from_utf8_lossy(&o.stderr));
        if expect == 1 {
            assert_eq!(stdout(&o), "NONE\n");
        }
    }
}

#[test]
fn congruence_last_letter() {
    let o = run(&["congruence", &fixture("last-letter-iffo.asst.json"), "--side", "left", "--W", "6"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("classes 3\n"));
    let o = run(&["congruence", &fixture("last-letter.asst.json"), "--W", "4", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["classes"].as_array().unwrap().len(), 3);
}

#[test]
fn dot_output() {
    let o = run(&["dot", &fixture("swap.bim.json")]);
    assert_eq!(stdout(&o).matches("digraph").count(), 2);
    let o = run(&["dot", &fixture("k3.graph.json"), "--name", "k3"]);
    assert!(stdout(&o).starts_with("graph \"k3\""));
}

#[test]
fn resource_guard_exit_code() {
    let o = Command::new(env!("CARGO_BIN_EXE_sstforge"))
        .args(["minrefine", &fixture("three-state.pc.json")])
        .env("SSTFORGE_GUARD", "search_nodes=1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 5, "{}", String::from_utf8_lossy(&o.stderr));
    let o = Command::new(env!("CARGO_BIN_EXE_sstforge"))
        .args(["minrefine", &fixture("three-state.pc.json")])
        .env("SSTFORGE_GUARD", "bogus")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn emitted_files_reparse_identically() {
    for f in ["last-letter.asst.json", "swap.bim.json", "swap.async.json", "three-state.pc.json", "k3.graph.json", "last-letter.fst.json"] {
        let text = std::fs::read_to_string(fixture(f)).unwrap();
        let m = sstforge::json::from_str(&text).unwrap();
        assert_eq!(sstforge::json::to_string(&m).trim(), text.trim(), "{f}");
    }
}
