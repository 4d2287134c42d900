//! The acceptance checks, shared by the `acceptance` test target and the
//! `wpaut examples` command.
//!
//! Each check returns a [`CheckOutcome`] listing every mismatch between an
//! expected and a computed value. Checks over the bounded family corpus
//! share one lazily built [`Corpus`].

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wpaut::ambient::{enumerate_monomials, mm_hypothesis, well_formed, DEFAULT_MONOMIAL_BUDGET};
use wpaut::arith::{is_prime, prime_power_decompose};
use wpaut::klein::{klein_eigenspace_check, klein_exists, klein_max_prime, klein_quasismooth};
use wpaut::orders::{
    admissible_orders, bound_coprime, bound_divides_d, divides_d_criterion, necessary_condition,
    oracle_exists_order, signature_from_chain, sufficient_condition, Budgets, CycleChain,
    OrderVerdict, Status, SweepOptions,
};
use wpaut::quasismooth::{
    general_member_quasismooth, singular_point_search, ExplicitPolynomial,
};
use wpaut::{MonomialSystem, PrimePowerOrder, WeightedFamily};

/// Orders examined over the corpus.
pub const CORPUS_ORDERS: [u64; 9] = [2, 3, 4, 5, 7, 8, 9, 11, 13];

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    /// One line per mismatch, `expected ... got ...`.
    pub diffs: Vec<String>,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl CheckOutcome {
    /// `PASS name (1.23 s): summary` or the FAIL equivalent.
    pub fn line(&self) -> String {
        format!(
            "{} {} ({:.2} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64(),
            self.summary
        )
    }
}

/// A named check with its runtime limit.
#[derive(Clone, Copy)]
pub struct Check {
    pub name: &'static str,
    pub title: &'static str,
    pub limit: Duration,
    run: fn(&Suite, &mut Recorder),
}

pub fn checks() -> Vec<Check> {
    let secs = Duration::from_secs;
    vec![
        Check {
            name: "c1-counterexample",
            title: "chain, signature prefix and oracle refutation for (3,7,2,4,5), d=37, q=23",
            limit: secs(60),
            run: c1_counterexample,
        },
        Check {
            name: "c2-prime-tables",
            title: "certified prime sets of four families up to their bounds",
            limit: secs(300),
            run: c2_prime_tables,
        },
        Check {
            name: "c3-klein-extremes",
            title: "maximal Klein primes and eigenspace counts",
            limit: secs(1),
            run: c3_klein_extremes,
        },
        Check {
            name: "c4-klein-classification",
            title: "Klein quasi-smoothness against the subset criterion",
            limit: secs(120),
            run: c4_klein_classification,
        },
        Check {
            name: "c5-oracle-equivalence",
            title: "criteria against the oracle over the bounded corpus",
            limit: secs(1800),
            run: c5_oracle_equivalence,
        },
        Check {
            name: "c6-bounds",
            title: "bounds and telescoping over the corpus",
            limit: secs(1800),
            run: c6_bounds,
        },
        Check {
            name: "c7-falsifier",
            title: "no singular points on certified witnesses; Klein quadric always singular",
            limit: secs(300),
            run: c7_falsifier,
        },
    ]
}

/// Shared state for a run of the checks.
pub struct Suite {
    inject_failure: bool,
    budgets: Budgets,
    corpus: OnceLock<Corpus>,
    table_witnesses: OnceLock<Vec<MonomialSystem>>,
}

impl Default for Suite {
    fn default() -> Self {
        Self::new(false)
    }
}

impl Suite {
    /// With `inject_failure`, one expected value is deliberately wrong.
    pub fn new(inject_failure: bool) -> Self {
        Self {
            inject_failure,
            budgets: Budgets::default(),
            corpus: OnceLock::new(),
            table_witnesses: OnceLock::new(),
        }
    }

    pub fn run(&self, check: &Check) -> CheckOutcome {
        let start = Instant::now();
        let mut rec = Recorder::default();
        (check.run)(self, &mut rec);
        let elapsed = start.elapsed();
        if elapsed > check.limit {
            rec.diff(format!(
                "runtime: expected < {} s, got {:.2} s",
                check.limit.as_secs(),
                elapsed.as_secs_f64()
            ));
        }
        CheckOutcome {
            name: check.name,
            passed: rec.diffs.is_empty(),
            summary: if rec.diffs.is_empty() {
                rec.summary
            } else {
                format!("{} [{} mismatch(es)]", rec.summary, rec.diffs.len())
            },
            diffs: rec.diffs,
            elapsed,
            limit: check.limit,
        }
    }

    pub fn run_named(&self, name: &str) -> Option<CheckOutcome> {
        checks().iter().find(|c| c.name == name).map(|c| self.run(c))
    }

    pub fn corpus(&self) -> &Corpus {
        self.corpus.get_or_init(|| Corpus::build(&self.budgets))
    }
}

#[derive(Default)]
struct Recorder {
    summary: String,
    diffs: Vec<String>,
}

impl Recorder {
    fn diff(&mut self, line: impl Into<String>) {
        self.diffs.push(line.into());
    }

    fn expect_eq<T: PartialEq + std::fmt::Debug>(&mut self, what: &str, expected: T, got: T) {
        if expected != got {
            self.diff(format!("{what}: expected {expected:?}, got {got:?}"));
        }
    }

    fn note(&mut self, s: impl AsRef<str>) {
        if !self.summary.is_empty() {
            self.summary.push_str("; ");
        }
        self.summary.push_str(s.as_ref());
    }
}

fn fam(w: &[u64], d: u64) -> WeightedFamily {
    WeightedFamily::new(w.to_vec(), d).expect("valid family")
}

fn order(q: u64) -> PrimePowerOrder {
    prime_power_decompose(q).expect("prime power")
}

fn c1_counterexample(suite: &Suite, rec: &mut Recorder) {
    let f = fam(&[3, 7, 2, 4, 5], 37);
    let q = order(23);
    match necessary_condition(&f, q, suite.budgets.cycles) {
        Ok(Some(chain)) => {
            rec.expect_eq("chain indices", &[0usize, 1, 2][..], chain.indices());
            rec.expect_eq("chain exponents", &[10u64, 5, 17][..], chain.exponents());
            let sig = signature_from_chain(&f, &chain, 23);
            rec.expect_eq("signature prefix", "(1,13,4,*,*)".to_string(), sig.to_string());
        }
        other => rec.diff(format!("necessary condition: expected a chain, got {other:?}")),
    }
    match oracle_exists_order(&f, q, &suite.budgets) {
        Ok(v) => {
            rec.expect_eq("oracle status", Status::Refuted, v.status);
            rec.note(format!("oracle {}: {}", v.status, v.notes.join(", ")));
        }
        Err(e) => rec.diff(format!("oracle: expected refuted, got error {e}")),
    }
}

fn c2_prime_tables(suite: &Suite, rec: &mut Recorder) {
    let table: [(&[u64], u64, &[u64], u64); 4] = [
        (&[1, 1, 1, 1, 1], 3, &[2, 3, 5, 11], 16),
        (&[1, 1, 1, 1, 2], 4, &[2, 3, 5, 7], 27),
        (&[1, 1, 1, 2, 3], 6, &[2, 3, 5, 7], 25),
        (&[1, 1, 2, 2, 3], 6, &[2, 3, 5], 6),
    ];
    let mut witnesses = Vec::new();
    for (w, d, expected, bound) in table {
        let f = fam(w, d);
        let got_bound = bound_divides_d(&f).map(|b| b.bound_string());
        rec.expect_eq(&format!("bound for {f}"), Ok(bound.to_string()), got_bound);
        let opts = SweepOptions {
            max_order: bound,
            primes_only: true,
            budgets: suite.budgets,
        };
        let verdicts = match admissible_orders(&f, &opts) {
            Ok(v) => v,
            Err(e) => {
                rec.diff(format!("{f}: sweep failed: {e}"));
                continue;
            }
        };
        let certified: Vec<u64> = verdicts
            .iter()
            .filter(|v| v.is_certified())
            .map(|v| v.order.p())
            .collect();
        rec.expect_eq(&format!("certified primes for {f}"), expected.to_vec(), certified);
        for v in &verdicts {
            if !v.is_certified() && v.status != Status::Refuted {
                rec.diff(format!("{f}, p = {}: expected refuted, got {}", v.order.p(), v.status));
            }
            if let Some(ws) = &v.witness_system {
                witnesses.push(ws.clone());
            }
        }
        rec.note(format!("{f}: {expected:?} up to {bound}"));
    }
    let _ = suite.table_witnesses.set(witnesses);
}

fn c3_klein_extremes(suite: &Suite, rec: &mut Recorder) {
    let cases: [(&[u64], u64, u64, usize, usize); 2] = [(&[1, 1, 1], 4, 7, 3, 15), (&[1, 1, 1, 1, 1], 3, 11, 5, 35)];
    for (w, d, prime, survivors, total) in cases {
        let f = fam(w, d);
        let expected_prime = if suite.inject_failure && prime == 7 { 8 } else { prime };
        let got = klein_max_prime(&f).ok().and_then(|k| k.prime());
        rec.expect_eq(&format!("maximal prime for {f}"), Some(expected_prime), got);
        match klein_eigenspace_check(&f, DEFAULT_MONOMIAL_BUDGET) {
            Ok(r) => {
                rec.expect_eq(&format!("eigenspace check for {f}"), true, r.matches);
                rec.expect_eq(
                    &format!("surviving/total monomials for {f}"),
                    (survivors, total),
                    (r.surviving.len(), r.total_monomials),
                );
            }
            Err(e) => rec.diff(format!("eigenspace check for {f}: {e}")),
        }
    }
    rec.note("maximal primes 7 and 11; survivors 3/15 and 5/35");
}

/// Sorted weight vectors of length `len` with entries in `1..=max` and gcd 1.
pub fn weight_multisets(len: usize, max: u64) -> Vec<Vec<u64>> {
    fn go(len: usize, lo: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for w in lo..=max {
            cur.push(w);
            go(len, w, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(len, 1, max, &mut Vec::new(), &mut out);
    out
}

fn c4_klein_classification(_suite: &Suite, rec: &mut Recorder) {
    let mut examined = 0;
    let mut false_cases = Vec::new();
    for len in 3..=6 {
        for w in weight_multisets(len, 4) {
            for d in 2..=12 {
                let Ok(f) = WeightedFamily::new(w.clone(), d) else { continue };
                let Some(k) = klein_exists(&f) else { continue };
                examined += 1;
                let by_formula = match klein_quasismooth(&f) {
                    Ok(b) => b,
                    Err(e) => {
                        rec.diff(format!("{f}: {e}"));
                        continue;
                    }
                };
                let by_criterion = match general_member_quasismooth(&k.system()) {
                    Ok(b) => b,
                    Err(e) => {
                        rec.diff(format!("{f}: {e}"));
                        continue;
                    }
                };
                if by_formula != by_criterion {
                    rec.diff(format!(
                        "{f}: Klein quasi-smoothness {by_formula}, subset criterion on the Klein monomials {by_criterion}"
                    ));
                }
                let expected_false = d == 2 && w.iter().all(|&a| a == 1) && f.dim() % 4 == 2;
                if !by_formula || !by_criterion {
                    false_cases.push(f.to_string());
                    if !expected_false {
                        rec.diff(format!("{f}: unexpected false verdict"));
                    }
                }
            }
        }
    }
    rec.note(format!(
        "{examined} families with a Klein cycle; false cases {false_cases:?}"
    ));
}

/// Oracle verdicts and criterion comparisons over the bounded corpus.
pub struct Corpus {
    pub families: usize,
    pub skipped: usize,
    pub comparisons: usize,
    pub disagreements: Vec<String>,
    pub bound_violations: Vec<String>,
    pub chains_checked: usize,
    pub certified_primes: usize,
    pub witnesses: Vec<MonomialSystem>,
}

impl Corpus {
    /// Families with `n` in `{1, 2, 3}` (`n = 2` only under the
    /// Matsumura–Monsky condition), weights `<= 5`, `3 <= d <= 12`,
    /// well-formed, against every order in [`CORPUS_ORDERS`].
    pub fn build(budgets: &Budgets) -> Self {
        let mut c = Corpus {
            families: 0,
            skipped: 0,
            comparisons: 0,
            disagreements: Vec::new(),
            bound_violations: Vec::new(),
            chains_checked: 0,
            certified_primes: 0,
            witnesses: Vec::new(),
        };
        for len in 3..=5 {
            for w in weight_multisets(len, 5) {
                for d in 3..=12 {
                    let Ok(f) = WeightedFamily::new(w.clone(), d) else { continue };
                    if !well_formed(&f) || (f.dim() == 2 && !mm_hypothesis(&f)) {
                        continue;
                    }
                    c.families += 1;
                    c.examine(&f, budgets);
                }
            }
        }
        c
    }

    fn examine(&mut self, f: &WeightedFamily, budgets: &Budgets) {
        let divides_bound = bound_divides_d(f).ok();
        let coprime_bound = bound_coprime(f).ok();
        for &qv in &CORPUS_ORDERS {
            let q = order(qv);
            let oracle = match oracle_exists_order(f, q, budgets) {
                Ok(v) => v,
                Err(_) => {
                    // outside the oracle's hypotheses; nothing to compare against
                    self.skipped += 1;
                    continue;
                }
            };
            if oracle.status == Status::Unresolved {
                self.disagreements.push(format!("{f}, q = {q}: oracle unresolved"));
                continue;
            }
            let oracle_certified = oracle.is_certified();
            let mut certified_by: Vec<&OrderVerdict> = Vec::new();
            if oracle_certified {
                certified_by.push(&oracle);
            }

            let divides = (q.is_prime() && f.all_weights_divide_degree())
                .then(|| divides_d_criterion(f, q.p()));
            if let Some(res) = &divides {
                self.comparisons += 1;
                match res {
                    Ok(v) if v.is_certified() == oracle_certified => {}
                    Ok(v) => self.disagreements.push(format!(
                        "{f}, q = {q}: divides-d {} vs oracle {}",
                        v.status, oracle.status
                    )),
                    Err(e) => self.disagreements.push(format!("{f}, q = {q}: divides-d error {e}")),
                }
                if let Ok(v) = res {
                    if v.is_certified() {
                        certified_by.push(v);
                    }
                }
            }

            let sufficient = sufficient_condition(f, q, budgets);
            if let Ok(Some(v)) = &sufficient {
                self.comparisons += 1;
                if !oracle_certified {
                    self.disagreements.push(format!(
                        "{f}, q = {q}: sufficient condition certified, oracle {}",
                        oracle.status
                    ));
                }
                certified_by.push(v);
            }

            let necessary = necessary_condition(f, q, budgets.cycles);
            match &necessary {
                Ok(None) => {
                    self.comparisons += 1;
                    if oracle.status != Status::Refuted {
                        self.disagreements.push(format!(
                            "{f}, q = {q}: necessary condition fails, oracle {}",
                            oracle.status
                        ));
                    }
                }
                Ok(Some(chain)) => self.check_chain(f, chain),
                Err(_) => {}
            }

            for v in &certified_by {
                if let Some(ch) = &v.chain {
                    self.check_chain(f, ch);
                }
                if let Some(ws) = &v.witness_system {
                    self.witnesses.push(ws.clone());
                }
                if !q.is_prime() {
                    continue;
                }
                self.certified_primes += 1;
                let p = q.p();
                if let Some(b) = &divides_bound {
                    if b.refutes(p) {
                        self.bound_violations.push(format!(
                            "{f}: certified p = {p} above the divides-d bound {} ({})",
                            b.bound_string(),
                            v.provenance
                        ));
                    }
                }
                if let Some(b) = &coprime_bound {
                    if b.refutes(p) {
                        self.bound_violations.push(format!(
                            "{f}: certified p = {p} > d at or above the coprime bound {} ({})",
                            b.bound_string(),
                            v.provenance
                        ));
                    }
                }
            }
        }
    }

    fn check_chain(&mut self, f: &WeightedFamily, chain: &CycleChain) {
        self.chains_checked += 1;
        if !chain.telescoping_holds(f) {
            self.bound_violations
                .push(format!("{f}: telescoping fails for chain {:?}", chain.indices()));
        }
    }
}

fn c5_oracle_equivalence(suite: &Suite, rec: &mut Recorder) {
    let c = suite.corpus();
    for d in &c.disagreements {
        rec.diff(d.clone());
    }
    rec.note(format!(
        "{} families, {} comparisons, {} (family, q) pairs outside oracle hypotheses, {} disagreements",
        c.families,
        c.comparisons,
        c.skipped,
        c.disagreements.len()
    ));
}

fn c6_bounds(suite: &Suite, rec: &mut Recorder) {
    let c = suite.corpus();
    for v in &c.bound_violations {
        rec.diff(v.clone());
    }
    rec.note(format!(
        "{} certified prime verdicts and {} chains checked, {} violations",
        c.certified_primes,
        c.chains_checked,
        c.bound_violations.len()
    ));
}

/// Searches of 20 000 points per (witness, prime) pair.
const FALSIFIER_BUDGET: u64 = 20_000;

fn c7_falsifier(suite: &Suite, rec: &mut Recorder) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let primes: Vec<u64> = (101..=997).filter(|&p| is_prime(p)).collect();

    let mut pool: Vec<MonomialSystem> = suite.corpus().witnesses.clone();
    if suite.table_witnesses.get().is_none() {
        c2_prime_tables(suite, &mut Recorder::default());
    }
    pool.extend(suite.table_witnesses.get().cloned().unwrap_or_default());
    pool.sort_by(|a, b| (a.family(), a.monomials()).cmp(&(b.family(), b.monomials())));
    pool.dedup();
    let sample: Vec<&MonomialSystem> = pool.choose_multiple(&mut rng, 100).collect();
    if sample.len() < 100 {
        rec.diff(format!("witness pool: expected at least 100, got {}", sample.len()));
    }

    let mut searches = 0;
    for (k, ws) in sample.iter().enumerate() {
        let poly = ExplicitPolynomial::random_member((*ws).clone(), k as u64);
        for &p in primes.choose_multiple(&mut rng, 3) {
            searches += 1;
            match singular_point_search(&poly, p, FALSIFIER_BUDGET, k as u64) {
                Ok(out) => {
                    if let Some(w) = out.witness {
                        rec.diff(format!(
                            "{}: singular point {w:?} over F_{p} on a certified witness",
                            ws.family()
                        ));
                    }
                }
                Err(e) => rec.diff(format!("{}: search over F_{p} failed: {e}", ws.family())),
            }
        }
    }

    let quadric_fam = fam(&[1, 1, 1, 1], 2);
    let quadric = klein_exists(&quadric_fam).expect("Klein quadric").system();
    let poly = ExplicitPolynomial::unit_coefficients(quadric);
    let mut quadric_primes = Vec::new();
    for &p in primes.choose_multiple(&mut rng, 3) {
        quadric_primes.push(p);
        match singular_point_search(&poly, p, 3 * p * p, p) {
            Ok(out) if out.witness.is_some() => {}
            Ok(_) => rec.diff(format!("Klein quadric over F_{p}: expected a singular point, got none")),
            Err(e) => rec.diff(format!("Klein quadric over F_{p}: {e}")),
        }
    }
    let mut s = String::new();
    let _ = write!(
        s,
        "{} witnesses from a pool of {}, {searches} searches clean; Klein quadric singular over {:?}",
        sample.len(),
        pool.len(),
        quadric_primes
    );
    rec.note(s);
}

/// Primes certified for `fam` when sweeping primes up to `max`.
pub fn certified_primes(f: &WeightedFamily, max: u64) -> BTreeSet<u64> {
    let opts = SweepOptions {
        max_order: max,
        primes_only: true,
        budgets: Budgets::default(),
    };
    admissible_orders(f, &opts)
        .map(|vs| vs.into_iter().filter(|v| v.is_certified()).map(|v| v.order.p()).collect())
        .unwrap_or_default()
}

/// Monomial count of a family, for quick sanity output.
pub fn monomial_count(f: &WeightedFamily) -> usize {
    enumerate_monomials(f, DEFAULT_MONOMIAL_BUDGET).map(|s| s.len()).unwrap_or(0)
}
