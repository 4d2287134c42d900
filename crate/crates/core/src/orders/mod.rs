//! Prime-power automorphism orders: cycle criteria, bounds and a brute-force oracle.
//!
//! Diagonal automorphisms are additive signatures `sigma` modulo `q`: the
//! automorphism `x_i -> xi^{sigma_i} x_i` for a primitive `q`-th root of
//! unity `xi`. A monomial `e` is scaled by `xi^{sigma . e}`, so a polynomial
//! is invariant up to scalar exactly when all its monomials share one
//! character `h = sigma . e (mod q)`.

mod bounds;
mod chains;
mod divides;
mod oracle;
mod sweep;

pub use bounds::{bound_coprime, bound_divides_d, BoundKind, BoundReport};
pub use chains::{
    chain_digraph, chain_invariance_check, for_each_simple_cycle, necessary_condition,
    off_chain_constraints, signature_from_chain, sufficient_condition, ChainDigraph,
    OffChainConstraint,
};
pub use divides::divides_d_criterion;
pub use oracle::oracle_exists_order;
pub use sweep::{admissible_orders, default_max_order, order_verdict, SweepOptions};

use std::fmt;

use num_bigint::BigUint;
use serde::Serialize;

use crate::ambient::{mm_hypothesis, Monomial, MonomialSystem, WeightedFamily};
use crate::arith::{effective_order, PrimePowerOrder};
use crate::error::{Error, Hypothesis, Result};
use crate::quasismooth::{general_member_quasismooth, required_monomial};

/// Work limits; exceeding any of them yields an unresolved verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budgets {
    /// Signature classes the oracle may visit per order.
    pub oracle_classes: u64,
    /// Monomials enumeration may produce.
    pub monomials: usize,
    /// Simple cycles cycle enumeration may report.
    pub cycles: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            oracle_classes: 2_000_000,
            monomials: 10_000_000,
            cycles: 100_000,
        }
    }
}

/// Distinct indices `(i_0, ..., i_l)` with exponents `m_j` such that
/// `a_{i_j} m_j + a_{i_{j+1}} = d` cyclically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CycleChain {
    indices: Vec<usize>,
    exponents: Vec<u64>,
}

impl CycleChain {
    pub fn new(fam: &WeightedFamily, indices: Vec<usize>, exponents: Vec<u64>) -> Result<Self> {
        let len = indices.len();
        if len < 2 || len > fam.num_vars() || exponents.len() != len {
            return Err(Error::InvalidFamily(format!(
                "a chain needs between 2 and {} indices with one exponent each",
                fam.num_vars()
            )));
        }
        let mut seen = vec![false; fam.num_vars()];
        for &i in &indices {
            if i >= fam.num_vars() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidFamily(format!("bad chain index {i}")));
            }
        }
        for j in 0..len {
            let (cur, next) = (indices[j], indices[(j + 1) % len]);
            let m = exponents[j];
            if m == 0 || fam.weight(cur) * m + fam.weight(next) != fam.degree() {
                return Err(Error::InvalidFamily(format!(
                    "x{cur}^{m}*x{next} does not have degree {}",
                    fam.degree()
                )));
            }
        }
        let chain = Self { indices, exponents };
        if !chain.telescoping_holds(fam) {
            return Err(Error::InconsistentCertificate("telescoping identity".into()));
        }
        Ok(chain)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// Length minus one.
    pub fn ell(&self) -> usize {
        self.indices.len() - 1
    }

    pub fn mask(&self) -> u32 {
        self.indices.iter().fold(0, |m, &i| m | (1 << i))
    }

    /// The exact product of the exponents.
    pub fn product(&self) -> BigUint {
        self.exponents.iter().map(|&m| BigUint::from(m)).product()
    }

    /// `prod (d - a_{i_t}) = (prod m_t)(prod a_{i_t})`, in exact integers.
    pub fn telescoping_holds(&self, fam: &WeightedFamily) -> bool {
        let d = fam.degree();
        let lhs: BigUint = self
            .indices
            .iter()
            .map(|&i| BigUint::from(d.saturating_sub(fam.weight(i))))
            .product();
        let weights: BigUint = self.indices.iter().map(|&i| BigUint::from(fam.weight(i))).product();
        lhs == self.product() * weights
    }

    /// `(-1)^{l+1} prod m_t = 1 (mod q)`.
    pub fn satisfies_congruence(&self, q: u64) -> bool {
        product_congruence(&self.exponents, q)
    }

    /// The cycle monomials `x_{i_j}^{m_j} x_{i_{j+1}}`.
    pub fn monomials(&self, num_vars: usize) -> Vec<Monomial> {
        let len = self.indices.len();
        (0..len)
            .map(|j| {
                Monomial::near_power(
                    num_vars,
                    self.indices[j],
                    self.exponents[j] as u32,
                    self.indices[(j + 1) % len],
                )
            })
            .collect()
    }
}

pub(crate) fn product_congruence(exponents: &[u64], q: u64) -> bool {
    let prod = exponents
        .iter()
        .fold(1 % q, |acc, &m| crate::arith::mul_mod(acc, m % q, q));
    let signed = if exponents.len() % 2 == 1 { (q - prod) % q } else { prod };
    signed == 1 % q
}

/// A full residue vector modulo `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Signature {
    q: u64,
    sigma: Vec<u64>,
}

impl Signature {
    pub fn new(q: u64, sigma: Vec<u64>) -> Self {
        let sigma = sigma.into_iter().map(|s| s % q).collect();
        Self { q, sigma }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn sigma(&self) -> &[u64] {
        &self.sigma
    }

    pub fn to_partial(&self) -> PartialSignature {
        PartialSignature {
            q: self.q,
            entries: self.sigma.iter().map(|&s| Some(s)).collect(),
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_partial().fmt(f)
    }
}

/// A residue vector with some entries left undetermined.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialSignature {
    q: u64,
    entries: Vec<Option<u64>>,
}

impl PartialSignature {
    pub fn new(q: u64, entries: Vec<Option<u64>>) -> Self {
        let entries = entries.into_iter().map(|s| s.map(|v| v % q)).collect();
        Self { q, entries }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn entries(&self) -> &[Option<u64>] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> Option<u64> {
        self.entries[i]
    }

    /// Fills undetermined entries with `fill`.
    pub fn complete_with(&self, fill: u64) -> Signature {
        Signature::new(self.q, self.entries.iter().map(|s| s.unwrap_or(fill)).collect())
    }
}

impl fmt::Display for PartialSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, s) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            match s {
                Some(v) => write!(f, "{v}")?,
                None => write!(f, "*")?,
            }
        }
        write!(f, ")")
    }
}

impl Serialize for PartialSignature {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Certified,
    Refuted,
    Unresolved,
    HypothesisViolated,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::Refuted => "refuted",
            Status::Unresolved => "unresolved",
            Status::HypothesisViolated => "hypothesis-violated",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which procedure produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// The family has no quasi-smooth member at all.
    NoQuasismoothMember,
    DividesDCriterion,
    BoundDividesD,
    BoundCoprime,
    SufficientCondition,
    NecessaryCondition,
    Oracle,
    /// A smaller power of the same prime is already refuted.
    DivisorOrder,
    /// Preconditions of every applicable procedure failed.
    Hypotheses,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::NoQuasismoothMember => "no-quasismooth-member",
            Provenance::DividesDCriterion => "divides-d-criterion",
            Provenance::BoundDividesD => "bound-divides-d",
            Provenance::BoundCoprime => "bound-coprime",
            Provenance::SufficientCondition => "sufficient-condition",
            Provenance::NecessaryCondition => "necessary-condition",
            Provenance::Oracle => "oracle",
            Provenance::DivisorOrder => "divisor-order",
            Provenance::Hypotheses => "hypotheses",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of deciding whether order `q` occurs.
///
/// Certified verdicts are only built through [`OrderVerdict::certified`],
/// which re-checks the certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderVerdict {
    pub order: PrimePowerOrder,
    pub status: Status,
    pub provenance: Provenance,
    pub chain: Option<CycleChain>,
    pub signature: Option<Signature>,
    /// Common character `h` of the witness monomials.
    pub eigenvalue: Option<u64>,
    pub witness_system: Option<MonomialSystem>,
    pub notes: Vec<String>,
}

impl OrderVerdict {
    /// A certified verdict, after checking that the witness is quasi-smooth,
    /// contains a required monomial for every variable, is invariant with
    /// character `eigenvalue`, and that the signature has effective order `q`.
    pub fn certified(
        order: PrimePowerOrder,
        provenance: Provenance,
        chain: Option<CycleChain>,
        signature: Signature,
        eigenvalue: u64,
        witness: MonomialSystem,
    ) -> Result<Self> {
        let q = order.q();
        let fail = |what: &str| Err(Error::InconsistentCertificate(format!("order {order}: {what}")));
        if signature.q() != q || signature.sigma().len() != witness.family().num_vars() {
            return fail("signature shape");
        }
        if witness.is_empty() || !general_member_quasismooth(&witness)? {
            return fail("witness system is not quasi-smooth");
        }
        let n = witness.family().num_vars();
        if (0..n).any(|i| required_monomial(&witness, i).is_none()) {
            return fail("a variable has no required monomial");
        }
        if witness
            .monomials()
            .iter()
            .any(|m| m.character(signature.sigma(), q) != eigenvalue % q)
        {
            return fail("witness is not an eigenspace of the signature");
        }
        if effective_order(signature.sigma(), witness.family().weights(), q) != q {
            return fail("effective order differs from q");
        }
        if let Some(c) = &chain {
            if !chain_invariance_check(c, &signature.to_partial()) {
                return fail("chain congruences");
            }
        }
        Ok(Self {
            order,
            status: Status::Certified,
            provenance,
            chain,
            signature: Some(signature),
            eigenvalue: Some(eigenvalue % q),
            witness_system: Some(witness),
            notes: Vec::new(),
        })
    }

    pub fn refuted(order: PrimePowerOrder, provenance: Provenance) -> Self {
        Self::bare(order, Status::Refuted, provenance)
    }

    pub fn unresolved(order: PrimePowerOrder, provenance: Provenance, note: impl Into<String>) -> Self {
        Self::bare(order, Status::Unresolved, provenance).with_note(note)
    }

    pub fn violated(order: PrimePowerOrder, provenance: Provenance, note: impl Into<String>) -> Self {
        Self::bare(order, Status::HypothesisViolated, provenance).with_note(note)
    }

    fn bare(order: PrimePowerOrder, status: Status, provenance: Provenance) -> Self {
        Self {
            order,
            status,
            provenance,
            chain: None,
            signature: None,
            eigenvalue: None,
            witness_system: None,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_chain(mut self, chain: CycleChain) -> Self {
        self.chain = Some(chain);
        self
    }

    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }
}

/// `d >= 3`, and the Matsumura–Monsky condition when `n = 2`.
///
/// One-dimensional families are admitted: every criterion here concerns
/// linear automorphisms, for which the curve case needs no extra hypothesis.
pub(crate) fn check_order_hypotheses(fam: &WeightedFamily) -> Result<()> {
    if fam.degree() < 3 {
        return Err(Error::HypothesisViolated(Hypothesis::DegreeAtLeastThree));
    }
    if fam.dim() == 2 && !mm_hypothesis(fam) {
        return Err(Error::HypothesisViolated(Hypothesis::MatsumuraMonsky));
    }
    Ok(())
}

/// `p` divides neither `d` nor any `d - a_i`.
pub(crate) fn check_prime_hypotheses(fam: &WeightedFamily, p: u64) -> Result<()> {
    let d = fam.degree() as i128;
    if d % p as i128 == 0 {
        return Err(Error::HypothesisViolated(Hypothesis::PrimeDividesDegree { p }));
    }
    for (index, &a) in fam.weights().iter().enumerate() {
        if (d - a as i128) % p as i128 == 0 {
            return Err(Error::HypothesisViolated(Hypothesis::PrimeDividesDegreeMinusWeight {
                p,
                index,
            }));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(w: &[u64], d: u64) -> WeightedFamily {
        WeightedFamily::new(w.to_vec(), d).unwrap()
    }

    #[test]
    fn chain_validation() {
        let f = fam(&[3, 7, 2, 4, 5], 37);
        let c = CycleChain::new(&f, vec![0, 1, 2], vec![10, 5, 17]).unwrap();
        assert_eq!(c.ell(), 2);
        assert_eq!(c.product(), BigUint::from(850u32));
        assert!(c.satisfies_congruence(23));
        assert!(!c.satisfies_congruence(29));
        assert!(CycleChain::new(&f, vec![0, 1, 2], vec![10, 5, 16]).is_err());
        assert!(CycleChain::new(&f, vec![0, 0], vec![10, 10]).is_err());
        assert!(CycleChain::new(&f, vec![0], vec![12]).is_err());
    }

    #[test]
    fn partial_signature_display() {
        let s = PartialSignature::new(23, vec![Some(1), Some(13), Some(4), None, None]);
        assert_eq!(s.to_string(), "(1,13,4,*,*)");
        assert_eq!(s.complete_with(0).sigma(), &[1, 13, 4, 0, 0]);
    }

    #[test]
    fn certificate_is_rechecked() {
        let f = fam(&[1, 1, 1], 4);
        let order = PrimePowerOrder::prime(7).unwrap();
        let chain = CycleChain::new(&f, vec![0, 1, 2], vec![3, 3, 3]).unwrap();
        let sys = MonomialSystem::new(f.clone(), chain.monomials(3)).unwrap();
        let good = Signature::new(7, vec![1, 4, 2]);
        assert!(OrderVerdict::certified(order, Provenance::Oracle, Some(chain.clone()), good, 0, sys.clone()).is_ok());
        let bad = Signature::new(7, vec![1, 4, 3]);
        assert!(matches!(
            OrderVerdict::certified(order, Provenance::Oracle, Some(chain), bad, 0, sys),
            Err(Error::InconsistentCertificate(_))
        ));
    }

    #[test]
    fn prime_hypotheses() {
        let f = fam(&[3, 7, 2, 4, 5], 37);
        assert!(check_prime_hypotheses(&f, 23).is_ok());
        assert_eq!(
            check_prime_hypotheses(&f, 37),
            Err(Error::HypothesisViolated(Hypothesis::PrimeDividesDegree { p: 37 }))
        );
        assert_eq!(
            check_prime_hypotheses(&f, 11),
            Err(Error::HypothesisViolated(Hypothesis::PrimeDividesDegreeMinusWeight {
                p: 11,
                index: 3
            }))
        );
    }
}
