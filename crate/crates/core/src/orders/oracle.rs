//! Exhaustive search over diagonal signatures.
//!
//! Two signatures induce the same cyclic subgroup of automorphisms of the
//! weighted projective space when they differ by a multiple of `a mod q`
//! and a unit scaling. Each class of effective order `q` has exactly one
//! representative with
//!
//! * `sigma_{i0} = 0`, where `i0` is the first index with `a_{i0}` a unit;
//! * entries before the first unit entry (skipping `i0`) divisible by `p`;
//! * that first unit entry equal to `1`.
//!
//! For each representative and each character `h` the invariant monomials
//! `{e : sigma . e = h}` are tested with the subset criterion. Before that,
//! `h` is restricted to characters shared by a candidate required monomial
//! of every variable.

use super::{Budgets, OrderVerdict, Provenance, Signature};
use crate::ambient::{
    enumerate_monomials, is_linear_cone, lin_finite, well_formed, Monomial, MonomialSystem,
    WeightedFamily,
};
use crate::arith::{mul_mod, PrimePowerOrder};
use crate::error::{Error, Hypothesis, Result};
use crate::quasismooth::subset_criterion;

use super::check_order_hypotheses;

/// Brute-force decision of whether some quasi-smooth member has a diagonal
/// automorphism of order exactly `q`.
///
/// Exceeding the class budget gives an unresolved verdict, never a refutation.
pub fn oracle_exists_order(
    fam: &WeightedFamily,
    q: PrimePowerOrder,
    budgets: &Budgets,
) -> Result<OrderVerdict> {
    check_order_hypotheses(fam)?;
    if !lin_finite(fam) {
        return Err(Error::HypothesisViolated(Hypothesis::FiniteLinearAutomorphisms));
    }
    if !well_formed(fam) {
        return Err(Error::HypothesisViolated(Hypothesis::WellFormed));
    }
    if is_linear_cone(fam) {
        return Err(Error::HypothesisViolated(Hypothesis::NotLinearCone));
    }
    let all = enumerate_monomials(fam, budgets.monomials)?;
    let search = Search::new(fam, &all, q);
    match search.run(budgets.oracle_classes) {
        Outcome::Found { sigma, h, eigenspace } => {
            let (sigma, h) = canonical_representative(fam, &sigma, h, q.q());
            // the transformed class has the same eigenspace
            let witness = MonomialSystem::new(fam.clone(), eigenspace)?;
            Ok(OrderVerdict::certified(q, Provenance::Oracle, None, Signature::new(q.q(), sigma), h, witness)?
                .with_note(format!("{} signature classes visited", search.visited.get())))
        }
        Outcome::Exhausted => Ok(OrderVerdict::refuted(q, Provenance::Oracle)
            .with_note(format!("all {} signature classes examined", search.visited.get()))),
        Outcome::OverBudget => Ok(OrderVerdict::unresolved(
            q,
            Provenance::Oracle,
            format!("signature class budget of {} exhausted", budgets.oracle_classes),
        )),
    }
}

enum Outcome {
    Found {
        sigma: Vec<u64>,
        h: u64,
        eigenspace: Vec<Monomial>,
    },
    Exhausted,
    OverBudget,
}

/// A monomial `x_i^k x_j` (or `x_i^k` when `j` is `None`) that could be required for `x_i`.
#[derive(Clone, Copy)]
struct Special {
    k: u64,
    j: Option<usize>,
}

struct Search<'a> {
    n: usize,
    q: u64,
    p: u64,
    pivot: usize,
    exponents: Vec<&'a [u32]>,
    monomials: &'a [Monomial],
    specials: Vec<Vec<Special>>,
    words: usize,
    visited: std::cell::Cell<u64>,
}

impl<'a> Search<'a> {
    fn new(fam: &WeightedFamily, all: &'a MonomialSystem, order: PrimePowerOrder) -> Self {
        let n = fam.num_vars();
        let p = order.p();
        let pivot = (0..n)
            .find(|&i| fam.weight(i) % p != 0)
            .expect("gcd of the weights is 1");
        let specials = (0..n)
            .map(|i| {
                all.monomials()
                    .iter()
                    .filter_map(|m| special_form(m.exponents(), i))
                    .collect()
            })
            .collect();
        Self {
            n,
            q: order.q(),
            p,
            pivot,
            exponents: all.monomials().iter().map(|m| m.exponents()).collect(),
            monomials: all.monomials(),
            specials,
            words: (order.q() as usize).div_ceil(64),
            visited: std::cell::Cell::new(0),
        }
    }

    fn run(&self, budget: u64) -> Outcome {
        if self.specials.iter().any(|s| s.is_empty()) {
            // some variable has no candidate required monomial in any eigenspace
            return Outcome::Exhausted;
        }
        let mut sigma = vec![0u64; self.n];
        let mut scratch = vec![0u64; self.words];
        match self.descend(0, false, &mut sigma, &mut scratch, budget) {
            Some(found) => found,
            None => Outcome::Exhausted,
        }
    }

    // Fills positions `pos..n`; returns Some when the search must stop.
    fn descend(
        &self,
        pos: usize,
        seen_unit: bool,
        sigma: &mut Vec<u64>,
        scratch: &mut Vec<u64>,
        budget: u64,
    ) -> Option<Outcome> {
        if pos == self.n {
            if !seen_unit {
                return None;
            }
            let visited = self.visited.get() + 1;
            self.visited.set(visited);
            if visited > budget {
                return Some(Outcome::OverBudget);
            }
            return self.examine(sigma, scratch);
        }
        if pos == self.pivot {
            sigma[pos] = 0;
            return self.descend(pos + 1, seen_unit, sigma, scratch, budget);
        }
        if seen_unit {
            for v in 0..self.q {
                sigma[pos] = v;
                if let Some(o) = self.descend(pos + 1, true, sigma, scratch, budget) {
                    return Some(o);
                }
            }
        } else {
            let mut v = 0;
            while v < self.q {
                sigma[pos] = v;
                if let Some(o) = self.descend(pos + 1, false, sigma, scratch, budget) {
                    return Some(o);
                }
                v += self.p;
            }
            sigma[pos] = 1 % self.q;
            if let Some(o) = self.descend(pos + 1, true, sigma, scratch, budget) {
                return Some(o);
            }
        }
        sigma[pos] = 0;
        None
    }

    fn examine(&self, sigma: &[u64], candidates: &mut [u64]) -> Option<Outcome> {
        let q = self.q;
        candidates.iter_mut().for_each(|w| *w = u64::MAX);
        let mut row = vec![0u64; self.words];
        for (i, specials) in self.specials.iter().enumerate() {
            row.iter_mut().for_each(|w| *w = 0);
            for s in specials {
                let mut c = mul_mod(s.k % q, sigma[i], q);
                if let Some(j) = s.j {
                    c = (c + sigma[j]) % q;
                }
                row[(c / 64) as usize] |= 1 << (c % 64);
            }
            let mut any = 0;
            for (c, r) in candidates.iter_mut().zip(&row) {
                *c &= r;
                any |= *c;
            }
            if any == 0 {
                return None;
            }
        }
        let chars: Vec<u64> = self
            .monomials
            .iter()
            .map(|m| m.character(sigma, q))
            .collect();
        let full = (1u32 << self.n) - 1;
        for h in 0..q {
            if candidates[(h / 64) as usize] & (1 << (h % 64)) == 0 {
                continue;
            }
            let members = || {
                chars
                    .iter()
                    .zip(&self.exponents)
                    .filter(move |(&c, _)| c == h)
                    .map(|(_, &e)| e)
            };
            if subset_criterion(self.n, full, members()).unwrap_or(false) {
                let eigenspace = chars
                    .iter()
                    .zip(self.monomials)
                    .filter(|(&c, _)| c == h)
                    .map(|(_, m)| m.clone())
                    .collect();
                return Some(Outcome::Found {
                    sigma: sigma.to_vec(),
                    h,
                    eigenspace,
                });
            }
        }
        None
    }
}

fn special_form(e: &[u32], i: usize) -> Option<Special> {
    if e[i] == 0 {
        return None;
    }
    let mut partner = None;
    for (j, &x) in e.iter().enumerate() {
        if j == i || x == 0 {
            continue;
        }
        if x != 1 || partner.is_some() {
            return None;
        }
        partner = Some(j);
    }
    Some(Special {
        k: e[i] as u64,
        j: partner,
    })
}

/// Lexicographically least `u (sigma + c a)` over units `u` and residues `c`,
/// with the character transformed alongside to `u (h + c d)`.
///
/// Large moduli skip the normalization to keep the cost bounded.
fn canonical_representative(fam: &WeightedFamily, sigma: &[u64], h: u64, q: u64) -> (Vec<u64>, u64) {
    if q > 4096 {
        return (sigma.to_vec(), h);
    }
    let d = fam.degree() % q;
    let mut best = (sigma.to_vec(), h);
    for u in (1..q).filter(|&u| num_integer::gcd(u, q) == 1) {
        for c in 0..q {
            let cand: Vec<u64> = sigma
                .iter()
                .zip(fam.weights())
                .map(|(&s, &a)| mul_mod(u, (s + mul_mod(c, a % q, q)) % q, q))
                .collect();
            if cand < best.0 {
                let h2 = mul_mod(u, (h + mul_mod(c, d, q)) % q, q);
                best = (cand, h2);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::prime_power_decompose;
    use crate::orders::Status;

    fn fam(w: &[u64], d: u64) -> WeightedFamily {
        WeightedFamily::new(w.to_vec(), d).unwrap()
    }

    fn run(w: &[u64], d: u64, q: u64) -> OrderVerdict {
        oracle_exists_order(&fam(w, d), prime_power_decompose(q).unwrap(), &Budgets::default()).unwrap()
    }

    #[test]
    fn klein_cubic_threefold() {
        let v = run(&[1, 1, 1, 1, 1], 3, 11);
        assert_eq!(v.status, Status::Certified);
        assert_eq!(v.witness_system.unwrap().len(), 5);
    }

    #[test]
    fn small_orders() {
        assert_eq!(run(&[1, 1, 1, 2, 3], 6, 7).status, Status::Certified);
        assert_eq!(run(&[1, 1, 1, 2, 3], 6, 11).status, Status::Refuted);
        assert_eq!(run(&[1, 1, 1], 4, 7).status, Status::Certified);
        assert_eq!(run(&[1, 1, 1], 4, 5).status, Status::Refuted);
    }

    #[test]
    fn class_count_matches_formula() {
        // classes of effective order q = 5 for N = 3 unit weights: (q^2 - 1)/(q - 1)
        let f = fam(&[1, 1, 1], 4);
        let all = enumerate_monomials(&f, 1000).unwrap();
        let s = Search::new(&f, &all, prime_power_decompose(5).unwrap());
        assert!(matches!(s.run(u64::MAX), Outcome::Exhausted));
        assert_eq!(s.visited.get(), 6);
    }

    #[test]
    fn budget_gives_unresolved() {
        let f = fam(&[3, 7, 2, 4, 5], 37);
        let b = Budgets {
            oracle_classes: 10,
            ..Budgets::default()
        };
        let v = oracle_exists_order(&f, prime_power_decompose(23).unwrap(), &b).unwrap();
        assert_eq!(v.status, Status::Unresolved);
    }

    #[test]
    fn hypotheses() {
        assert_eq!(
            oracle_exists_order(&fam(&[1, 1, 3], 3), prime_power_decompose(2).unwrap(), &Budgets::default()),
            Err(Error::HypothesisViolated(Hypothesis::FiniteLinearAutomorphisms))
        );
    }
}
