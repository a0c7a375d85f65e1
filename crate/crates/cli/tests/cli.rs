use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperzeta")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn wenum_on_triangle_code() {
    let o = run(&["wenum", "--in", path(&data("k3_code.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1 + z^3\n");
}

#[test]
fn coin_prints_the_alternating_sum() {
    let o = run(&["coin", "--sizes", "1,1"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "0\n"));
    let o = run(&["coin", "--sizes", "1"]);
    assert_eq!(stdout(&o), "-1\n");
    let o = run(&["coin", "--sizes", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bass2_on_two_cycle() {
    let o = run(&["bass2", "--digraph", path(&data("two_cycle.json")), "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "PASS  det = 1 - x0*x1\n");
}

#[test]
fn evenset_matches_code() {
    let o = run(&["evenset", "--in", path(&data("k4.json")), "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "PASS  even sets = cycle-space code = 1 + 4*z^3 + 3*z^4\n");
}

#[test]
fn pm_lists_both_matchings() {
    let o = run(&["pm", "--in", path(&data("fixture_b.json")), "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "matchings 2\n  p1 p2 p3\n  e4 e5 e6\nenumerator 1 + z^2\nPASS  per(T(H)) = 1 + z^2\n");
}

#[test]
fn pipeline_reports_per_stage() {
    let o = run(&["pipeline", "--in", path(&data("fixture_b.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("input       3 parts of size 3, 6 edges\nenumerator  1 + z^2\n"), "{text}");
    for name in ["permanent", "matchings", "signing", "contract", "normalize", "bass4", "circuits"] {
        assert!(text.lines().any(|l| l.starts_with("PASS  ") && l[6..].starts_with(name)), "{name} missing in {text}");
    }
    assert!(text.ends_with("\nPASS\n"));

    let j = run(&["pipeline", "--in", path(&data("fixture_a.json")), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["status"], "PASS");
    assert_eq!(v["enumerator"], "1");
    assert_eq!(v["gadget"]["part_size"], 13);
}

#[test]
fn pipeline_rejects_imperfect_matching() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("fixture_b.json")).unwrap().replace("\"matching\":[0,1,2]", "\"matching\":[0,1]");
    let p = dir.path().join("bad.json");
    std::fs::write(&p, text).unwrap();
    let o = run(&["pipeline", "--in", path(&p)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("FAIL  stage 0 (input)"), "{}", stdout(&o));
}

#[test]
fn malformed_and_missing_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.json");
    std::fs::write(&p, "{\"n\": 3, \"basis\": [[1, 1").unwrap();
    for args in [vec!["wenum", "--in", path(&p)], vec!["wenum", "--in", "/no/such/file.json"], vec!["bass4"]] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn gadget_contract_and_sign_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let [g, m, d, s] = ["g.json", "m.json", "d.json", "s.json"].map(|n| dir.path().join(n));
    let o = run(&["gadget", "--in", path(&data("fixture_b.json")), "--out", path(&g), "--map", path(&m)]);
    assert_eq!(stdout(&o), "H' has 4 parts of size 69, 138 edges; P' has 69 edges\n");
    let map: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(map["edges"].as_array().unwrap().len(), 6);

    // the gadget file carries its matching, so it can be contracted and signed
    let o = run(&["contract", "--in", path(&g), "--out", path(&d), "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "D has 69 vertices, 69 hyperedges\nPASS  T(H, x) = I + A(D, y)\n");
    let dh: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&d).unwrap()).unwrap();
    assert_eq!(dh["arity"], 4);

    let o = run(&["sign", "--in", path(&g), "--out", path(&s)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS  per = 1 + z^2, det = 1 + z^2; 3 support graphs verified"));
    assert!(std::fs::read_to_string(&s).unwrap().contains("\"sign\": \"-\""));
}

#[test]
fn bass4_verifies_and_limits_exit_2() {
    let o = run(&["bass4", "--in", path(&data("latin.json")), "--max-degree", "8", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "PASS  det = 1 + x0*x1*x2*x3\ncirculations 1\n");
    let o = run(&["bass4", "--in", path(&data("bouquet.json")), "--max-degree", "8", "--max-multisets", "2"]);
    assert_eq!(o.status.code(), Some(2));
}
