use std::ops::ControlFlow;

use serde::Serialize;

use super::{
    check_order_hypotheses, check_prime_hypotheses, product_congruence, Budgets, CycleChain,
    OrderVerdict, PartialSignature, Provenance,
};
use crate::ambient::{enumerate_monomials, Monomial, MonomialSystem, WeightedFamily};
use crate::arith::{mul_mod, solve_linear_congruence, PrimePowerOrder};
use crate::error::{Error, Result};
use crate::quasismooth::quasismooth_on_variables;

/// Edges `i -> j` (`i != j`) whenever `x_i^m x_j` has degree `d` for some `m >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainDigraph {
    successors: Vec<Vec<(usize, u64)>>,
}

impl ChainDigraph {
    /// The digraph without any hypothesis on a prime.
    pub fn unrestricted(fam: &WeightedFamily) -> Self {
        let n = fam.num_vars();
        let d = fam.degree();
        let successors = (0..n)
            .map(|i| {
                let a = fam.weight(i);
                (0..n)
                    .filter(|&j| j != i && fam.weight(j) < d)
                    .filter_map(|j| {
                        let rest = d - fam.weight(j);
                        (rest % a == 0).then_some((j, rest / a))
                    })
                    .collect()
            })
            .collect();
        Self { successors }
    }

    pub fn num_vertices(&self) -> usize {
        self.successors.len()
    }

    /// Successors of `i` with the exponent `m` of `x_i^m x_j`, by increasing `j`.
    pub fn successors(&self, i: usize) -> &[(usize, u64)] {
        &self.successors[i]
    }

    pub fn exponent(&self, i: usize, j: usize) -> Option<u64> {
        self.successors[i].iter().find(|&&(k, _)| k == j).map(|&(_, m)| m)
    }
}

/// The chain digraph for order `q = p^r`; requires `p` to divide neither `d` nor any `d - a_i`.
pub fn chain_digraph(fam: &WeightedFamily, q: PrimePowerOrder) -> Result<ChainDigraph> {
    check_prime_hypotheses(fam, q.p())?;
    Ok(ChainDigraph::unrestricted(fam))
}

/// Visits every simple cycle of length at least 2 once, as the rotation
/// starting at its smallest index, in lexicographic order of index tuples.
///
/// `visit` receives the indices and the exponents along the cycle.
pub fn for_each_simple_cycle<F>(graph: &ChainDigraph, budget: u64, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize], &[u64]) -> ControlFlow<()>,
{
    let n = graph.num_vertices();
    let mut count = 0u64;
    let mut path = Vec::with_capacity(n);
    let mut exps = Vec::with_capacity(n);
    let mut on_path = vec![false; n];
    for start in 0..n {
        path.push(start);
        on_path[start] = true;
        let flow = extend(graph, start, &mut path, &mut exps, &mut on_path, &mut count, budget, &mut visit)?;
        on_path[start] = false;
        path.pop();
        if flow.is_break() {
            break;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn extend<F>(
    graph: &ChainDigraph,
    start: usize,
    path: &mut Vec<usize>,
    exps: &mut Vec<u64>,
    on_path: &mut [bool],
    count: &mut u64,
    budget: u64,
    visit: &mut F,
) -> Result<ControlFlow<()>>
where
    F: FnMut(&[usize], &[u64]) -> ControlFlow<()>,
{
    let v = *path.last().expect("path starts nonempty");
    // closing here gives a prefix of every extension, hence a smaller tuple
    if path.len() >= 2 {
        if let Some(m) = graph.exponent(v, start) {
            *count += 1;
            if *count > budget {
                return Err(Error::BudgetExceeded {
                    what: "cycle enumeration",
                    limit: budget,
                });
            }
            exps.push(m);
            let flow = visit(path, exps);
            exps.pop();
            if flow.is_break() {
                return Ok(flow);
            }
        }
    }
    for &(w, m) in graph.successors(v) {
        if w <= start || on_path[w] {
            continue;
        }
        path.push(w);
        exps.push(m);
        on_path[w] = true;
        let flow = extend(graph, start, path, exps, on_path, count, budget, visit)?;
        on_path[w] = false;
        exps.pop();
        path.pop();
        if flow.is_break() {
            return Ok(flow);
        }
    }
    Ok(ControlFlow::Continue(()))
}

/// First cycle (lexicographically) with `(-1)^{l+1} prod m_t = 1 (mod q)`.
///
/// Under the hypotheses, an automorphism of order `q` of a quasi-smooth
/// member forces such a cycle, so `None` refutes the order.
pub fn necessary_condition(
    fam: &WeightedFamily,
    q: PrimePowerOrder,
    cycle_budget: u64,
) -> Result<Option<CycleChain>> {
    check_order_hypotheses(fam)?;
    let graph = chain_digraph(fam, q)?;
    let mut found = None;
    for_each_simple_cycle(&graph, cycle_budget, |idx, exps| {
        if product_congruence(exps, q.q()) {
            found = Some((idx.to_vec(), exps.to_vec()));
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    found
        .map(|(idx, exps)| CycleChain::new(fam, idx, exps))
        .transpose()
}

/// Residues along the chain: `1` at its first index and
/// `sigma_{i_{j+1}} = -m_j sigma_{i_j}`; other entries are left open.
pub fn signature_from_chain(fam: &WeightedFamily, chain: &CycleChain, q: u64) -> PartialSignature {
    let mut entries = vec![None; fam.num_vars()];
    let mut current = 1 % q;
    entries[chain.indices()[0]] = Some(current);
    for j in 0..chain.ell() {
        current = mul_mod(q - current % q, chain.exponents()[j] % q, q) % q;
        entries[chain.indices()[j + 1]] = Some(current);
    }
    PartialSignature::new(q, entries)
}

/// `sigma_{i_j} m_j + sigma_{i_{j+1}} = 0 (mod q)` for every `j`, cyclically.
///
/// Undetermined entries on the chain make the check fail.
pub fn chain_invariance_check(chain: &CycleChain, sig: &PartialSignature) -> bool {
    let q = sig.q();
    let idx = chain.indices();
    let len = idx.len();
    (0..len).all(|j| {
        let (Some(cur), Some(next)) = (sig.get(idx[j]), sig.get(idx[(j + 1) % len])) else {
            return false;
        };
        (mul_mod(cur, chain.exponents()[j] % q, q) + next) % q == 0
    })
}

/// Splits the variables into a qualifying cycle and its complement, and
/// certifies `q` when the cycle polynomial and the full complement system
/// are both quasi-smooth on their own variables.
///
/// The certificate pads the chain signature with zeros on the complement.
pub fn sufficient_condition(
    fam: &WeightedFamily,
    q: PrimePowerOrder,
    budgets: &Budgets,
) -> Result<Option<OrderVerdict>> {
    check_order_hypotheses(fam)?;
    let graph = chain_digraph(fam, q)?;
    let n = fam.num_vars();
    let full_mask = (1u32 << n) - 1;
    let all = enumerate_monomials(fam, budgets.monomials)?;

    let mut found: Option<Result<OrderVerdict>> = None;
    for_each_simple_cycle(&graph, budgets.cycles, |idx, exps| {
        if !product_congruence(exps, q.q()) {
            return ControlFlow::Continue(());
        }
        match try_split(fam, q, &all, idx, exps, full_mask) {
            Ok(None) => ControlFlow::Continue(()),
            Ok(Some(v)) => {
                found = Some(Ok(v));
                ControlFlow::Break(())
            }
            Err(e) => {
                found = Some(Err(e));
                ControlFlow::Break(())
            }
        }
    })?;
    found.transpose()
}

fn try_split(
    fam: &WeightedFamily,
    q: PrimePowerOrder,
    all: &MonomialSystem,
    idx: &[usize],
    exps: &[u64],
    full_mask: u32,
) -> Result<Option<OrderVerdict>> {
    let n = fam.num_vars();
    let chain = CycleChain::new(fam, idx.to_vec(), exps.to_vec())?;
    let cycle = MonomialSystem::new(fam.clone(), chain.monomials(n))?;
    if !quasismooth_on_variables(&cycle, chain.mask())? {
        return Ok(None);
    }
    let complement_mask = full_mask & !chain.mask();
    let mut witness: Vec<Monomial> = cycle.monomials().to_vec();
    if complement_mask != 0 {
        let complement = all.restricted_to(complement_mask);
        if complement.is_empty() || !quasismooth_on_variables(&complement, complement_mask)? {
            return Ok(None);
        }
        witness.extend(complement.monomials().iter().cloned());
    }
    let signature = signature_from_chain(fam, &chain, q.q()).complete_with(0);
    let witness = MonomialSystem::new(fam.clone(), witness)?;
    OrderVerdict::certified(q, Provenance::SufficientCondition, Some(chain), signature, 0, witness)
        .map(Some)
}

/// A linear condition `k sigma_j + sigma_i = 0 (mod q)` on an off-chain
/// entry, coming from a monomial `x_j^k x_i` with `i` on the chain (or a
/// pure power `x_j^k`, with no partner).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OffChainConstraint {
    pub variable: usize,
    pub monomial: Monomial,
    pub coefficient: u64,
    pub partner: Option<usize>,
    /// Right-hand side `c` of `k sigma_j = c (mod q)`.
    pub rhs: u64,
    /// All residues `sigma_j` solving it.
    pub solutions: Vec<u64>,
}

/// Constraints on every off-chain variable from the monomials that could
/// serve as its required monomial, given the chain residues in `sig`.
///
/// Monomials pairing two off-chain variables involve two unknowns and are
/// not listed.
pub fn off_chain_constraints(
    fam: &WeightedFamily,
    chain: &CycleChain,
    sig: &PartialSignature,
) -> Vec<OffChainConstraint> {
    let q = sig.q();
    let n = fam.num_vars();
    let d = fam.degree();
    let mut out = Vec::new();
    for j in (0..n).filter(|j| !chain.indices().contains(j)) {
        let a = fam.weight(j);
        if d % a == 0 {
            let k = d / a;
            out.push(OffChainConstraint {
                variable: j,
                monomial: Monomial::pure_power(n, j, k as u32),
                coefficient: k,
                partner: None,
                rhs: 0,
                solutions: solve_linear_congruence(k % q, 0, q),
            });
        }
        for &i in chain.indices() {
            let b = fam.weight(i);
            if b >= d || (d - b) % a != 0 {
                continue;
            }
            let k = (d - b) / a;
            let Some(si) = sig.get(i) else { continue };
            let rhs = (q - si % q) % q;
            out.push(OffChainConstraint {
                variable: j,
                monomial: Monomial::near_power(n, j, k as u32, i),
                coefficient: k,
                partner: Some(i),
                rhs,
                solutions: solve_linear_congruence(k % q, rhs, q),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Hypothesis;

    fn fam(w: &[u64], d: u64) -> WeightedFamily {
        WeightedFamily::new(w.to_vec(), d).unwrap()
    }

    fn pp(q: u64) -> PrimePowerOrder {
        crate::arith::prime_power_decompose(q).unwrap()
    }

    #[test]
    fn digraph_edges() {
        let f = fam(&[3, 7, 2, 4, 5], 37);
        let g = chain_digraph(&f, pp(23)).unwrap();
        assert_eq!(g.exponent(0, 1), Some(10));
        assert_eq!(g.exponent(1, 2), Some(5));
        assert_eq!(g.exponent(2, 0), Some(17));

        let g = ChainDigraph::unrestricted(&fam(&[1, 1, 1], 4));
        for i in 0..3 {
            assert_eq!(g.successors(i).len(), 2);
        }

        let g = ChainDigraph::unrestricted(&fam(&[1, 1, 1, 2], 4));
        assert_eq!(g.exponent(0, 3), Some(2));
        assert_eq!(g.exponent(3, 0), None);
        assert_eq!(g.exponent(3, 3), None);
    }

    #[test]
    fn digraph_rejects_bad_primes() {
        let f = fam(&[3, 7, 2, 4, 5], 37);
        assert_eq!(
            chain_digraph(&f, pp(37)),
            Err(Error::HypothesisViolated(Hypothesis::PrimeDividesDegree { p: 37 }))
        );
    }

    #[test]
    fn cycles_come_in_lex_order() {
        let g = ChainDigraph::unrestricted(&fam(&[1, 1, 1], 4));
        let mut seen = Vec::new();
        for_each_simple_cycle(&g, 100, |idx, _| {
            seen.push(idx.to_vec());
            ControlFlow::Continue(())
        })
        .unwrap();
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 1, 2], vec![0, 2], vec![0, 2, 1], vec![1, 2]]
        );
        let err = for_each_simple_cycle(&g, 3, |_, _| ControlFlow::Continue(()));
        assert!(matches!(err, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn necessary_examples() {
        let f = fam(&[3, 7, 2, 4, 5], 37);
        let c = necessary_condition(&f, pp(23), 1000).unwrap().unwrap();
        assert_eq!(c.indices(), &[0, 1, 2]);
        assert_eq!(c.exponents(), &[10, 5, 17]);

        let ones = fam(&[1; 6], 3);
        let c = necessary_condition(&ones, pp(11), 100_000).unwrap().unwrap();
        assert_eq!(c.ell(), 4);
        assert!(necessary_condition(&ones, pp(13), 100_000).unwrap().is_none());
    }

    #[test]
    fn signatures_from_chains() {
        let f = fam(&[3, 7, 2, 4, 5], 37);
        let c = CycleChain::new(&f, vec![0, 1, 2], vec![10, 5, 17]).unwrap();
        let s = signature_from_chain(&f, &c, 23);
        assert_eq!(s.to_string(), "(1,13,4,*,*)");
        assert!(chain_invariance_check(&c, &s));
        let mut bumped = s.entries().to_vec();
        bumped[1] = Some(14);
        assert!(!chain_invariance_check(&c, &PartialSignature::new(23, bumped)));
        // the zero signature satisfies every homogeneous congruence
        assert!(chain_invariance_check(&c, &PartialSignature::new(23, vec![Some(0); 5])));
        assert!(!chain_invariance_check(&c, &PartialSignature::new(23, vec![None; 5])));

        let ones = fam(&[1; 6], 3);
        let full = CycleChain::new(&ones, (0..6).collect(), vec![2; 6]).unwrap();
        let s = signature_from_chain(&ones, &full, 11);
        assert_eq!(s.complete_with(0).sigma(), &[1, 9, 4, 3, 5, 1]);
    }

    #[test]
    fn sufficient_examples() {
        let b = Budgets::default();
        let ones = fam(&[1; 6], 3);
        let v = sufficient_condition(&ones, pp(11), &b).unwrap().unwrap();
        assert_eq!(v.chain.as_ref().unwrap().indices(), &[0, 1, 2, 3, 4]);
        assert_eq!(v.witness_system.as_ref().unwrap().len(), 6);

        let f = fam(&[1, 1, 1, 2, 3], 6);
        let v = sufficient_condition(&f, pp(7), &b).unwrap().unwrap();
        let c = v.chain.unwrap();
        assert_eq!(c.indices(), &[0, 1, 2]);
        assert_eq!(c.exponents(), &[5, 5, 5]);

        let f = fam(&[3, 7, 2, 4, 5], 37);
        assert!(sufficient_condition(&f, pp(23), &b).unwrap().is_none());
    }

    #[test]
    fn off_chain_conflict() {
        let f = fam(&[3, 7, 2, 4, 5], 37);
        let c = CycleChain::new(&f, vec![0, 1, 2], vec![10, 5, 17]).unwrap();
        let s = signature_from_chain(&f, &c, 23);
        let cs = off_chain_constraints(&f, &c, &s);
        let for4: Vec<_> = cs.iter().filter(|c| c.variable == 4).collect();
        assert_eq!(for4.len(), 2);
        assert_eq!((for4[0].coefficient, for4[0].partner, &for4[0].solutions[..]), (6, Some(1), &[17][..]));
        assert_eq!((for4[1].coefficient, for4[1].partner, &for4[1].solutions[..]), (7, Some(2), &[6][..]));
        assert!(cs.iter().all(|c| c.variable != 3));
    }
}
