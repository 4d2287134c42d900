use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wpaut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wpaut"))
        .args(args)
        .env_remove("WPAUT_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn validate(v: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/query_report.schema.json");
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    if let Err(errors) = compiled.validate(v) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("schema violations: {msgs:#?}");
    };
}

fn verdict(report: &Value, q: u64) -> &Value {
    report["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["q"] == q)
        .unwrap_or_else(|| panic!("no verdict for q = {q}"))
}

fn certified_primes(report: &Value) -> Vec<u64> {
    report["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| v["status"] == "certified" && v["r"] == 1)
        .map(|v| v["p"].as_u64().unwrap())
        .collect()
}

#[test]
fn orders_refutes_23_for_the_counterexample() {
    let out = wpaut(&["orders", "--weights", "3,7,2,4,5", "--degree", "37", "--max-order", "37"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    validate(&r);
    let v = verdict(&r, 23);
    assert_eq!(v["status"], "refuted");
    assert_eq!(v["provenance"], "oracle");
    assert_eq!(r["weights"], serde_json::json!([3, 7, 2, 4, 5]));
}

#[test]
fn orders_certified_set() {
    let out = wpaut(&["orders", "--weights", "1,1,1,2,3", "--degree", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    validate(&r);
    assert_eq!(certified_primes(&r), vec![2, 3, 5, 7]);
    assert_eq!(r["bounds"]["divides_d"]["bound"], "25");
}

#[test]
fn orders_rejects_two_weights() {
    let out = wpaut(&["orders", "--weights", "1,1", "--degree", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 3 weights"));
}

#[test]
fn orders_reports_violated_hypotheses() {
    let out = wpaut(&["orders", "--weights", "1,1,1", "--degree", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    validate(&r);
    assert_eq!(r["hypotheses"]["degree_at_least_three"], false);
    assert!(r["error"].is_string());
}

#[test]
fn usage_errors() {
    assert_eq!(wpaut(&["orders", "--weights", "a,b", "--degree", "3"]).status.code(), Some(64));
    assert_eq!(wpaut(&["orders", "--degree", "3"]).status.code(), Some(64));
    assert_eq!(wpaut(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(
        wpaut(&["check", "--weights", "1,1,1", "--degree", "4", "--order", "6"]).status.code(),
        Some(64)
    );
    assert_eq!(wpaut(&["scan", "--dim", "1", "--max-weight", "2"]).status.code(), Some(64));
    assert_eq!(wpaut(&["--help"]).status.code(), Some(0));
    assert_eq!(wpaut(&["--version"]).status.code(), Some(0));
}

#[test]
fn check_certifies_11_on_the_cubic_threefold() {
    let out = wpaut(&["check", "--weights", "1,1,1,1,1", "--degree", "3", "--order", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    validate(&r);
    let v = verdict(&r, 11);
    assert_eq!(v["status"], "certified");
    let witness = v["witness_monomials"].as_array().unwrap();
    assert!(witness.len() >= 5);
    assert_eq!(r["falsifier"]["witness"], Value::Null);
}

#[test]
fn check_explains_the_counterexample() {
    let out = wpaut(&["check", "--weights", "3,7,2,4,5", "--degree", "37", "--order", "23", "--explain"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    validate(&r);
    let e = &r["explain"];
    assert_eq!(e["signature_prefix"], "(1,13,4,*,*)");
    assert_eq!(e["chain"]["exponents"], serde_json::json!([10, 5, 17]));
    let eqs: Vec<(&str, &Value)> = e["constraints"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["equation"].as_str().unwrap(), &c["solutions"]))
        .collect();
    assert!(eqs.contains(&("6σ4+σ1 ≡ 0 (mod 23)", &serde_json::json!([17]))), "{eqs:?}");
    assert!(eqs.contains(&("7σ4+σ2 ≡ 0 (mod 23)", &serde_json::json!([6]))), "{eqs:?}");
    assert_eq!(e["disjoint_solutions"], serde_json::json!([4]));
    assert_eq!(verdict(&r, 23)["status"], "refuted");
}

#[test]
fn check_prime_power_goes_to_the_oracle() {
    let out = wpaut(&["check", "--weights", "1,1,1", "--degree", "4", "--order", "8"]);
    let r = json(&out);
    validate(&r);
    let v = verdict(&r, 8);
    assert_eq!(v["r"], 3);
    assert_eq!(v["provenance"], "oracle");
    assert!(v["status"] == "certified" || v["status"] == "refuted");
}

#[test]
fn klein_examples() {
    let r = json(&wpaut(&["klein", "--weights", "1,1,1", "--degree", "4"]));
    validate(&r);
    let k = &r["klein"];
    assert_eq!(k["exists"], true);
    assert_eq!(k["quasismooth"], true);
    assert_eq!(k["max_prime"]["value"], 7);
    assert_eq!(k["eigenspace_check"]["matches"], true);

    let r = json(&wpaut(&["klein", "--weights", "1,1,1,2", "--degree", "4"]));
    validate(&r);
    assert_eq!(r["klein"]["exists"], false);

    let r = json(&wpaut(&["klein", "--weights", "1,1,1,1", "--degree", "2"]));
    validate(&r);
    assert_eq!(r["klein"]["exists"], true);
    assert_eq!(r["klein"]["quasismooth"], false);
    assert_eq!(r["klein"]["singularity_r"], "0");
}

#[test]
fn seed_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_wpaut"))
        .args(["check", "--weights", "1,1,1", "--degree", "4", "--order", "7"])
        .env("WPAUT_SEED", "42")
        .output()
        .unwrap();
    let r = json(&out);
    assert_eq!(r["seed"], 42);
    assert_eq!(r["falsifier"]["seed"], 42);
    let flag = json(&wpaut(&["check", "--weights", "1,1,1", "--degree", "4", "--order", "7", "--seed", "42"]));
    assert_eq!(r, flag);
}

#[test]
fn reports_are_reproducible() {
    let args = ["orders", "--weights", "1,1,1,1,2", "--degree", "4", "--primes-only"];
    assert_eq!(wpaut(&args).stdout, wpaut(&args).stdout);
    let timed = json(&wpaut(&[&args[..], &["--timings"]].concat()));
    assert!(timed["timings"]["total_ms"].is_u64());
}

#[test]
fn scan_single_family() {
    let out = wpaut(&["scan", "--dim", "1", "--max-weight", "1", "--degree", "4..4"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = lines(&out);
    assert_eq!(recs.len(), 1);
    validate(&recs[0]);
    assert_eq!(recs[0]["weights"], serde_json::json!([1, 1, 1]));
    assert_eq!(recs[0]["degree"], 4);
}

#[test]
fn scan_empty_range() {
    let out = wpaut(&["scan", "--dim", "1", "--max-weight", "1", "--degree", "5..4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn scan_respects_the_divides_d_bound() {
    let out = wpaut(&[
        "scan", "--dim", "3", "--max-weight", "3", "--max-degree", "12", "--divides-d", "--primes-only",
    ]);
    let recs = lines(&out);
    assert!(!recs.is_empty());
    let mut keys = Vec::new();
    for r in &recs {
        validate(r);
        let ws: Vec<u64> = r["weights"].as_array().unwrap().iter().map(|w| w.as_u64().unwrap()).collect();
        let d = r["degree"].as_u64().unwrap();
        assert!(ws.iter().all(|a| d % a == 0));
        keys.push((ws.len(), ws.clone(), d));
        if r["error"].is_string() {
            continue;
        }
        let bound: u64 = r["bounds"]["divides_d"]["bound"].as_str().unwrap().parse().unwrap();
        for p in certified_primes(r) {
            assert!(p <= bound, "{ws:?} d={d}: certified {p} above {bound}");
        }
    }
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn scan_output_independent_of_workers() {
    let base = ["scan", "--dim", "1..2", "--max-weight", "3", "--max-degree", "9", "--primes-only"];
    let one = wpaut(&[&base[..], &["--jobs", "1"]].concat());
    let three = wpaut(&[&base[..], &["--jobs", "3", "--batch", "5"]].concat());
    assert_eq!(one.status.code(), three.status.code());
    assert!(!one.stdout.is_empty());
    assert_eq!(one.stdout, three.stdout);
}

#[test]
fn scan_resumes_after_interruption() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.jsonl");
    let part = dir.path().join("part.jsonl");
    let base = ["scan", "--dim", "1", "--max-weight", "3", "--max-degree", "10", "--primes-only", "--batch", "4"];
    let run = |out: &Path| wpaut(&[&base[..], &["--output", out.to_str().unwrap()]].concat());

    let first = run(&full);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let expected = fs::read(&full).unwrap();
    let n = expected.iter().filter(|&&b| b == b'\n').count();
    assert!(n > 8);

    // state after two batches, plus half a record from the interrupted third
    let cut = expected
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == b'\n')
        .nth(7)
        .map(|(i, _)| i + 1)
        .unwrap();
    let cursor: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("full.jsonl.cursor")).unwrap()).unwrap();
    let mut partial = expected[..cut].to_vec();
    partial.extend_from_slice(b"{\"weights\":[1,");
    fs::write(&part, &partial).unwrap();
    let mut c = cursor.clone();
    c["next"] = 8.into();
    c["bytes"] = (cut as u64).into();
    fs::write(dir.path().join("part.jsonl.cursor"), c.to_string()).unwrap();

    let second = run(&part);
    assert!(second.status.success(), "{}", String::from_utf8_lossy(&second.stderr));
    assert_eq!(fs::read(&part).unwrap(), expected);

    // a finished scan is a no-op; other parameters need --restart
    assert!(run(&part).status.success());
    assert_eq!(fs::read(&part).unwrap(), expected);
    let other = wpaut(&["scan", "--dim", "1", "--max-weight", "2", "--max-degree", "10", "--output", part.to_str().unwrap()]);
    assert_eq!(other.status.code(), Some(64));
}

#[test]
fn examples_list_and_injected_failure() {
    let out = wpaut(&["examples", "--list"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 7);

    let out = wpaut(&["examples", "--only", "c3-klein-extremes"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS c3-klein-extremes"));

    let out = wpaut(&["examples", "--only", "c3-klein-extremes", "--inject-failure"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL c3-klein-extremes"));
    assert!(text.contains("expected Some(8), got Some(7)"), "{text}");

    assert_eq!(wpaut(&["examples", "--only", "nope"]).status.code(), Some(64));
}
