use std::collections::BTreeMap;
use std::ops::ControlFlow;

use super::{
    bound_coprime, bound_divides_d, check_order_hypotheses, divides_d_criterion,
    for_each_simple_cycle, necessary_condition, oracle_exists_order, sufficient_condition,
    BoundReport, Budgets, ChainDigraph, OrderVerdict, Provenance, Status,
};
use crate::ambient::{is_linear_cone, lin_finite, well_formed, WeightedFamily};
use crate::arith::{prime_powers_up_to, PrimePowerOrder};
use crate::error::{Error, Hypothesis, Result};
use crate::quasismooth::exists_quasismooth;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    pub max_order: u64,
    /// Skip prime powers `p^r` with `r >= 2`.
    pub primes_only: bool,
    pub budgets: Budgets,
}

/// A verdict for every prime power `q <= max_order`, in increasing order.
///
/// Routing per `q`: families without quasi-smooth members refute everything;
/// prime `q` with all weights dividing `d` goes to the divides-d criterion;
/// bounds refute large primes; then the sufficient condition, the necessary
/// condition (refuting when no cycle qualifies) and finally the oracle.
/// A failure for one `q` is recorded in its verdict and never stops the sweep.
pub fn admissible_orders(fam: &WeightedFamily, opts: &SweepOptions) -> Result<Vec<OrderVerdict>> {
    let exists = sweep_preconditions(fam)?;
    let divides = bound_divides_d(fam).ok();
    let coprime = bound_coprime(fam).ok();

    let orders = prime_powers_up_to(opts.max_order)
        .into_iter()
        .filter(|q| !opts.primes_only || q.is_prime());
    // an automorphism of order p^r has powers of every order p^s, s < r
    let mut refuted: BTreeMap<u64, PrimePowerOrder> = BTreeMap::new();
    Ok(orders
        .map(|q| {
            if let Some(lower) = refuted.get(&q.p()) {
                return OrderVerdict::refuted(q, Provenance::DivisorOrder)
                    .with_note(format!("order {} is refuted", lower.q()));
            }
            let v = decide(fam, q, exists, divides.as_ref(), coprime.as_ref(), &opts.budgets);
            if v.status == Status::Refuted {
                refuted.insert(q.p(), q);
            }
            v
        })
        .collect())
}

/// The verdict for a single order, routed as in [`admissible_orders`].
pub fn order_verdict(fam: &WeightedFamily, q: PrimePowerOrder, budgets: &Budgets) -> Result<OrderVerdict> {
    let exists = sweep_preconditions(fam)?;
    let divides = bound_divides_d(fam).ok();
    let coprime = bound_coprime(fam).ok();
    Ok(decide(fam, q, exists, divides.as_ref(), coprime.as_ref(), budgets))
}

// Returns whether a quasi-smooth member exists at all.
fn sweep_preconditions(fam: &WeightedFamily) -> Result<bool> {
    check_order_hypotheses(fam)?;
    if !well_formed(fam) {
        return Err(Error::HypothesisViolated(Hypothesis::WellFormed));
    }
    if !lin_finite(fam) {
        return Err(Error::HypothesisViolated(Hypothesis::FiniteLinearAutomorphisms));
    }
    if is_linear_cone(fam) {
        return Err(Error::HypothesisViolated(Hypothesis::NotLinearCone));
    }
    exists_quasismooth(fam)
}

fn decide(
    fam: &WeightedFamily,
    q: PrimePowerOrder,
    exists: bool,
    divides: Option<&BoundReport>,
    coprime: Option<&BoundReport>,
    budgets: &Budgets,
) -> OrderVerdict {
    if !exists {
        return OrderVerdict::refuted(q, Provenance::NoQuasismoothMember);
    }
    let mut notes = Vec::new();
    if q.is_prime() && divides.is_some() {
        match divides_d_criterion(fam, q.p()) {
            Ok(v) => return v,
            Err(e) => notes.push(format!("divides-d criterion: {e}")),
        }
    }
    if let Some(b) = divides.filter(|b| b.refutes(q.p())) {
        return OrderVerdict::refuted(q, Provenance::BoundDividesD)
            .with_note(format!("p = {} exceeds the bound {}", q.p(), b.bound_string()));
    }
    if let Some(b) = coprime.filter(|b| b.refutes(q.p())) {
        return OrderVerdict::refuted(q, Provenance::BoundCoprime)
            .with_note(format!("d < p = {} and p >= {}", q.p(), b.bound_string()));
    }
    match sufficient_condition(fam, q, budgets) {
        Ok(Some(v)) => return v,
        Ok(None) => {}
        Err(e) => notes.push(format!("sufficient condition: {e}")),
    }
    match necessary_condition(fam, q, budgets.cycles) {
        Ok(None) => {
            return OrderVerdict::refuted(q, Provenance::NecessaryCondition)
                .with_note("no cycle satisfies the product congruence")
        }
        Ok(Some(_)) => {}
        Err(e) => notes.push(format!("necessary condition: {e}")),
    }
    let mut verdict = match oracle_exists_order(fam, q, budgets) {
        Ok(v) => v,
        Err(e @ Error::HypothesisViolated(_)) => {
            OrderVerdict::violated(q, Provenance::Hypotheses, e.to_string())
        }
        Err(e) => OrderVerdict::unresolved(q, Provenance::Oracle, e.to_string()),
    };
    if verdict.chain.is_none() {
        if let Ok(Some(c)) = necessary_condition(fam, q, budgets.cycles) {
            verdict.chain = Some(c);
        }
    }
    notes.append(&mut verdict.notes);
    verdict.notes = notes;
    verdict
}

/// Largest order worth sweeping: beyond `max(d, prod m + 1)` over all
/// cycles the necessary condition refutes every prime, and the applicable
/// bound may cut further.
pub fn default_max_order(fam: &WeightedFamily, cycle_budget: u64) -> Result<u64> {
    let graph = ChainDigraph::unrestricted(fam);
    let mut best = fam.degree();
    for_each_simple_cycle(&graph, cycle_budget, |_, exps| {
        let prod = exps
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(m))
            .and_then(|x| x.checked_add(1))
            .unwrap_or(u64::MAX);
        best = best.max(prod);
        ControlFlow::Continue(())
    })?;
    if let Ok(b) = bound_divides_d(fam) {
        best = best.min(b.largest_open().max(fam.degree()));
    }
    if let Ok(b) = bound_coprime(fam) {
        best = best.min(b.largest_open());
    }
    Ok(best)
}
