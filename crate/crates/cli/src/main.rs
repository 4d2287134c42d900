mod report;
mod scan;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use wpaut::ambient::parse_weights;
use wpaut::arith::{is_prime, prime_power_decompose};
use wpaut::orders::{
    admissible_orders, default_max_order, necessary_condition, order_verdict, Budgets, Status,
    SweepOptions,
};
use wpaut::quasismooth::{singular_point_search, ExplicitPolynomial};
use wpaut::{Error, WeightedFamily};
use wpaut_suite::{checks, Suite};

use report::{Explain, KleinJson, QueryReport, Timings, VerdictJson};

const EXIT_HYPOTHESIS: u8 = 1;
const EXIT_UNRESOLVED: u8 = 2;
const EXIT_SUITE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "wpaut", version, about = "Automorphism orders of quasi-smooth weighted hypersurfaces")]
struct Cli {
    /// Add wall-clock timings to reports (makes output non-reproducible)
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify or refute every prime power order up to a limit
    Orders(OrdersArgs),
    /// Detailed report for a single order
    Check(CheckArgs),
    /// Klein hypersurface of a family
    Klein(KleinArgs),
    /// Batch scan over a range of families, as JSON lines
    Scan(scan::ScanArgs),
    /// Run the reproducible example checks
    Examples(ExamplesArgs),
}

#[derive(Clone, Debug)]
struct WeightList(Vec<u64>);

fn weight_list(s: &str) -> std::result::Result<WeightList, String> {
    parse_weights(s).map(WeightList).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Clone)]
struct FamilyArgs {
    /// Comma-separated weights, e.g. 3,7,2,4,5
    #[arg(long, value_parser = weight_list)]
    weights: WeightList,
    #[arg(long)]
    degree: u64,
}

impl FamilyArgs {
    fn family(&self) -> Result<WeightedFamily, Error> {
        WeightedFamily::new(self.weights.0.clone(), self.degree)
    }
}

#[derive(Args, Debug, Clone)]
pub struct BudgetArgs {
    /// Signature classes the oracle may visit per order
    #[arg(long, default_value_t = Budgets::default().oracle_classes)]
    oracle_budget: u64,
    /// Monomials enumerated per family
    #[arg(long, default_value_t = Budgets::default().monomials)]
    monomial_budget: usize,
    /// Simple cycles enumerated per digraph
    #[arg(long, default_value_t = Budgets::default().cycles)]
    cycle_budget: u64,
    /// Seed for randomized steps
    #[arg(long, env = "WPAUT_SEED", default_value_t = 0)]
    seed: u64,
}

impl BudgetArgs {
    pub fn budgets(&self) -> Budgets {
        Budgets {
            oracle_classes: self.oracle_budget,
            monomials: self.monomial_budget,
            cycles: self.cycle_budget,
        }
    }
}

#[derive(Args, Debug)]
struct OrdersArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Largest order examined; defaults to the point past which every prime is refuted
    #[arg(long)]
    max_order: Option<u64>,
    /// Skip prime powers p^r with r >= 2
    #[arg(long)]
    primes_only: bool,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Prime power order q
    #[arg(long)]
    order: u64,
    /// Add the cycle chain and the constraints it forces on the other variables
    #[arg(long)]
    explain: bool,
    /// Points examined by the singular point search on the witness
    #[arg(long, default_value_t = 20_000)]
    falsifier_budget: u64,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Debug)]
struct KleinArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = Budgets::default().monomials)]
    monomial_budget: usize,
}

#[derive(Args, Debug)]
struct ExamplesArgs {
    /// Print check names and exit
    #[arg(long)]
    list: bool,
    /// Run only these checks
    #[arg(long = "only", value_name = "NAME")]
    only: Vec<String>,
    /// Corrupt one expected value, to see a failure reported
    #[arg(long)]
    inject_failure: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("wpaut: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. }) => EXIT_UNRESOLVED,
        Some(Error::Parse(_)) | Some(Error::NotAPrimePower(_)) => EXIT_USAGE,
        _ if e.downcast_ref::<scan::UsageError>().is_some() => EXIT_USAGE,
        _ => EXIT_HYPOTHESIS,
    }
}

fn run(cli: Cli) -> Result<u8> {
    let start = Instant::now();
    let timings = cli.timings;
    let finish = |mut r: QueryReport| -> Result<u8> {
        if timings {
            r.timings = Some(Timings {
                total_ms: start.elapsed().as_millis(),
            });
        }
        let code = report_exit_code(&r);
        print_json(&r)?;
        Ok(code)
    };
    match cli.command {
        Command::Orders(a) => finish(cmd_orders(&a)?),
        Command::Check(a) => finish(cmd_check(&a)?),
        Command::Klein(a) => {
            let fam = a.family.family()?;
            let mut r = QueryReport::new(&fam, 0, Budgets::default());
            r.klein = Some(KleinJson::of(&fam, a.monomial_budget));
            finish(r)
        }
        Command::Scan(a) => scan::run(&a, timings),
        Command::Examples(a) => cmd_examples(&a),
    }
}

fn report_exit_code(r: &QueryReport) -> u8 {
    if r.error.is_some() || r.any_status(Status::HypothesisViolated) {
        EXIT_HYPOTHESIS
    } else if r.any_status(Status::Unresolved) {
        EXIT_UNRESOLVED
    } else {
        0
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// The full sweep report for one family; hypothesis failures land in `error`.
pub fn orders_report(
    fam: &WeightedFamily,
    max_order: Option<u64>,
    primes_only: bool,
    budget: &BudgetArgs,
) -> QueryReport {
    let budgets = budget.budgets();
    let mut r = QueryReport::new(fam, budget.seed, budgets);
    r.klein = Some(KleinJson::of(fam, budgets.monomials));
    let max_order = match max_order {
        Some(m) => Ok(m),
        None => default_max_order(fam, budgets.cycles),
    };
    let opts = max_order.map(|max_order| SweepOptions {
        max_order,
        primes_only,
        budgets,
    });
    match opts.and_then(|o| admissible_orders(fam, &o)) {
        Ok(vs) => r.verdicts = vs.iter().map(VerdictJson::from).collect(),
        Err(e) => r.error = Some(e.to_string()),
    }
    r
}

fn cmd_orders(a: &OrdersArgs) -> Result<QueryReport> {
    let fam = a.family.family()?;
    Ok(orders_report(&fam, a.max_order, a.primes_only, &a.budget))
}

fn cmd_check(a: &CheckArgs) -> Result<QueryReport> {
    let fam = a.family.family()?;
    let q = prime_power_decompose(a.order)?;
    let budgets = a.budget.budgets();
    let mut r = QueryReport::new(&fam, a.budget.seed, budgets);
    let verdict = match order_verdict(&fam, q, &budgets) {
        Ok(v) => v,
        Err(e) => {
            r.error = Some(e.to_string());
            return Ok(r);
        }
    };
    if a.explain {
        let chain = verdict
            .chain
            .clone()
            .or_else(|| necessary_condition(&fam, q, budgets.cycles).ok().flatten());
        r.explain = Some(Explain::of(&fam, chain.as_ref(), q.q()));
    }
    if let Some(ws) = &verdict.witness_system {
        let poly = ExplicitPolynomial::random_member(ws.clone(), a.budget.seed);
        let prime = falsifier_prime(a.budget.seed, fam.degree());
        let out = singular_point_search(&poly, prime, a.falsifier_budget, a.budget.seed)
            .context("singular point search")?;
        r.falsifier = Some(out);
    }
    r.verdicts.push(VerdictJson::from(&verdict));
    Ok(r)
}

// A prime in [101, 997], chosen by the seed, avoiding the degree.
fn falsifier_prime(seed: u64, degree: u64) -> u64 {
    let primes: Vec<u64> = (101..=997).filter(|&p| is_prime(p) && degree % p != 0).collect();
    primes[(seed % primes.len() as u64) as usize]
}

fn cmd_examples(a: &ExamplesArgs) -> Result<u8> {
    let all = checks();
    if a.list {
        for c in &all {
            println!("{}  {}", c.name, c.title);
        }
        return Ok(0);
    }
    for name in &a.only {
        if !all.iter().any(|c| c.name == name) {
            return Err(scan::UsageError(format!("unknown check {name:?}; see --list")).into());
        }
    }
    let suite = Suite::new(a.inject_failure);
    let mut failed = 0;
    for c in all.iter().filter(|c| a.only.is_empty() || a.only.iter().any(|n| n == c.name)) {
        let out = suite.run(c);
        println!("{}", out.line());
        for d in &out.diffs {
            println!("    {d}");
        }
        if !out.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} check(s) failed");
        Ok(EXIT_SUITE)
    } else {
        Ok(0)
    }
}
