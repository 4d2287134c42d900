use std::sync::OnceLock;

use wpaut_suite::{checks, Suite};

fn suite() -> &'static Suite {
    static SUITE: OnceLock<Suite> = OnceLock::new();
    SUITE.get_or_init(Suite::default)
}

fn run(name: &str) {
    let out = suite().run_named(name).expect("known check");
    println!("{}", out.line());
    for d in &out.diffs {
        println!("    {d}");
    }
    assert!(out.passed, "{}", out.line());
}

#[test]
fn c1_counterexample() {
    run("c1-counterexample");
}

#[test]
fn c2_prime_tables() {
    run("c2-prime-tables");
}

#[test]
fn c3_klein_extremes() {
    run("c3-klein-extremes");
}

#[test]
fn c4_klein_classification() {
    run("c4-klein-classification");
}

#[test]
fn c5_oracle_equivalence() {
    run("c5-oracle-equivalence");
}

#[test]
fn c6_bounds() {
    run("c6-bounds");
}

#[test]
fn c7_falsifier() {
    run("c7-falsifier");
}

#[test]
fn every_check_has_a_test() {
    let names: Vec<_> = checks().iter().map(|c| c.name).collect();
    assert_eq!(names.len(), 7);
}
