use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cirquent")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn decide_cl5_reports_a_witness() {
    let out = run(&["decide", "--system", "cl5", "--formula", "~P | P"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"], "provable");
    assert_eq!(v["witness"]["sigma"]["x1"], "P");
}

#[test]
fn decide_exit_codes_follow_provability() {
    assert_eq!(code(&run(&["decide", "--system", "ccc", "--formula", "P | Q"])), 1);
    assert_eq!(code(&run(&["decide", "--system", "ccc", "--formula", "P -> P"])), 0);
    assert_eq!(code(&run(&["decide", "--system", "cl5", "--formula", "~P | P & P"])), 1);
    assert_eq!(code(&run(&["decide", "--system", "cl5minus", "--formula", "P | P"])), 1);
    let counted = json(&run(&["decide", "--system", "cl5", "--formula", "~P | P", "--count-witnesses"]));
    assert_eq!(counted["witness_count"], 1);
}

#[test]
fn prove_then_check_round_trip() {
    let dir = TempDir::new().unwrap();
    let proof = dir.path().join("p.json");
    let out = run(&["prove", "--system", "cl5minus", "--formula", "~P | P", "--emit-proof", path_str(&proof)]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"], "proved");
    assert_eq!(v["metrics"]["size"], 8);
    let checked = run(&["check", "--system", "cl5minus", "--proof", path_str(&proof)]);
    assert_eq!(code(&checked), 0);
    assert_eq!(json(&checked)["valid"], true);
}

#[test]
fn check_rejects_a_tampered_proof_with_json_diagnostics() {
    let dir = TempDir::new().unwrap();
    let proof = dir.path().join("p.json");
    run(&["prove", "--system", "cl5minus", "--formula", "~P | P", "--emit-proof", path_str(&proof)]);
    let mut tree: Value = serde_json::from_str(&fs::read_to_string(&proof).unwrap()).unwrap();
    tree["cirquent"]["pool"][0] = Value::from("~P & P");
    fs::write(&proof, tree.to_string()).unwrap();
    let out = run(&["check", "--system", "cl5minus", "--proof", path_str(&proof)]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["valid"], false);
    let stderr = String::from_utf8(out.stderr).unwrap();
    let first: Value = serde_json::from_str(stderr.lines().next().expect("a diagnostic")).unwrap();
    assert_eq!(first["rule"], "OrIntro");
}

#[test]
fn check_rejects_rules_outside_the_system() {
    let dir = TempDir::new().unwrap();
    let proof = dir.path().join("p.json");
    let out = run(&["prove", "--system", "ccc", "--formula", "~P | P & P", "--emit-proof", path_str(&proof)]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&run(&["check", "--system", "ccc", "--proof", path_str(&proof)])), 0);
    assert_eq!(code(&run(&["check", "--system", "cl5minus", "--proof", path_str(&proof)])), 1);
}

#[test]
fn prove_reports_refutation_and_budget() {
    assert_eq!(code(&run(&["prove", "--system", "cl5minus", "--formula", "P | P"])), 1);
    let out = run(&["prove", "--system", "cl5", "--formula", "(~P|P)&(~Q|Q)", "--budget-nodes", "1"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["result"], "budget_exceeded");
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("g.txt");
    fs::write(&graph, "a b\n").unwrap();
    assert_eq!(code(&run(&["reduce-vc", "--graph", path_str(&graph), "--k", "0"])), 2);
    assert_eq!(code(&run(&["decide", "--system", "cl6", "--formula", "P"])), 2);
    assert_eq!(code(&run(&["parse", "--formula", "P &"])), 2);
    assert_eq!(code(&run(&["check", "--system", "ccc", "--proof", "/nonexistent/p.json"])), 2);
    assert_eq!(code(&run(&["bench", "--family", "identity"])), 2);
}

#[test]
fn stdout_is_deterministic() {
    let args = ["prove", "--system", "cl5", "--formula", "(~P | P) & (~Q | Q) | R"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let dec = ["decide", "--system", "cl5", "--formula", "~P | P | ~Q & Q"];
    assert_eq!(run(&dec).stdout, run(&dec).stdout);
}

#[test]
fn reductions_emit_formula_and_metadata() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("g.txt");
    fs::write(&graph, "vertices: a b c\na b\n").unwrap();
    let vc = json(&run(&["reduce-vc", "--graph", path_str(&graph), "--k", "1"]));
    assert_eq!(vc["dropped_vertices"][0], "c");
    let formula = vc["formula"].as_str().unwrap().to_string();
    assert_eq!(code(&run(&["decide", "--system", "cl5minus", "--formula", &formula])), 0);
    assert_eq!(json(&run(&["oracle", "vc", "--graph", path_str(&graph), "--k", "1"]))["cover"][0], "a");

    let qbf = dir.path().join("q.txt");
    fs::write(&qbf, "exists x\nforall y\ndnf x & y | x & ~y\n").unwrap();
    let reduced = json(&run(&["reduce-qbf", "--instance", path_str(&qbf)]));
    assert_eq!(reduced["fresh"]["Z_x"]["role"], "guard");
    let formula = reduced["formula"].as_str().unwrap().to_string();
    assert_eq!(code(&run(&["decide", "--system", "cl5", "--formula", &formula])), 0);
    assert_eq!(code(&run(&["oracle", "qbf", "--instance", path_str(&qbf)])), 0);
}

#[test]
fn bench_emits_csv_rows() {
    let out = run(&["bench", "--family", "identity", "--count", "3", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["instance_id", "k", "result", "rule_count", "proof_size", "max_width", "elapsed_ms"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(&rows[0][0], "identity-001");
    assert!(rows.iter().all(|r| &r[2] == "proved"));
    let k: Vec<usize> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(k, [3, 7, 11]);
}

#[test]
fn render_cirquent_formats() {
    let dir = TempDir::new().unwrap();
    let out = run(&["render-cirquent", "--formula", "P & Q", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["pool"][0], "P & Q");
    assert_eq!(v["groups"][0][0], 1);
    let file = dir.path().join("c.json");
    fs::write(&file, r#"{"pool":["A","B","A","D"],"groups":[[1,2],[2,3],[4]]}"#).unwrap();
    let text = run(&["render-cirquent", "--cirquent", path_str(&file)]);
    assert_eq!(code(&text), 0);
    let dot = run(&["render-cirquent", "--cirquent", path_str(&file), "--format", "dot"]);
    assert!(String::from_utf8(dot.stdout).unwrap().starts_with("digraph"));
    let back = dir.path().join("c.txt");
    fs::write(&back, &text.stdout).unwrap();
    let again = run(&["render-cirquent", "--cirquent", path_str(&back), "--format", "json"]);
    assert_eq!(json(&again), serde_json::from_str::<Value>(&fs::read_to_string(&file).unwrap()).unwrap());
}

#[test]
fn parse_reports_shape() {
    let v = json(&run(&["parse", "--formula", "P -> Q & ~R"]));
    assert_eq!(v["formula"], "~P | Q & ~R");
    assert_eq!(v["length"], 5);
    assert_eq!(v["binary"], true);
}
