//! Klein hypersurfaces `x_{i_0}^{m_0} x_{i_1} + ... + x_{i_{n+1}}^{m_{n+1}} x_{i_0}`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::ambient::{enumerate_monomials, Monomial, MonomialSystem, WeightedFamily};
use crate::arith::is_prime_big;
use crate::error::{Error, Hypothesis, Result};
use crate::orders::{signature_from_chain, ChainDigraph, CycleChain, Signature};

/// Cap on the number of Hamiltonian cycles counted per family.
pub const KLEIN_CYCLE_BUDGET: u64 = 100_000;

/// The lexicographically first Klein cycle of a family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KleinData {
    pub family: WeightedFamily,
    /// Variable indices in cycle order, starting at 0.
    pub ordering: Vec<usize>,
    /// `m_t` with `a_{ordering[t]} m_t + a_{ordering[t+1]} = d`.
    pub exponents: Vec<u64>,
    /// Number of distinct Klein cycles, up to [`KLEIN_CYCLE_BUDGET`].
    pub cycle_count: u64,
    /// False when counting stopped at the budget.
    pub count_complete: bool,
}

impl KleinData {
    pub fn chain(&self) -> CycleChain {
        CycleChain::new(&self.family, self.ordering.clone(), self.exponents.clone())
            .expect("Klein cycles satisfy the chain equations")
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.chain().monomials(self.family.num_vars())
    }

    pub fn system(&self) -> MonomialSystem {
        MonomialSystem::new(self.family.clone(), self.monomials()).expect("degree-d monomials")
    }

    pub fn product(&self) -> BigUint {
        self.exponents.iter().map(|&m| BigUint::from(m)).product()
    }

    pub fn r(&self) -> BigInt {
        klein_singularity_r(self)
    }
}

/// Searches Hamiltonian cycles of the unrestricted chain digraph.
pub fn klein_exists(fam: &WeightedFamily) -> Option<KleinData> {
    let graph = ChainDigraph::unrestricted(fam);
    let n = fam.num_vars();
    let mut state = Hamilton {
        graph: &graph,
        path: vec![0],
        exps: Vec::new(),
        used: vec![false; n],
        first: None,
        count: 0,
    };
    state.used[0] = true;
    let complete = state.walk();
    let (ordering, exponents) = state.first?;
    Some(KleinData {
        family: fam.clone(),
        ordering,
        exponents,
        cycle_count: state.count,
        count_complete: complete,
    })
}

struct Hamilton<'a> {
    graph: &'a ChainDigraph,
    path: Vec<usize>,
    exps: Vec<u64>,
    used: Vec<bool>,
    first: Option<(Vec<usize>, Vec<u64>)>,
    count: u64,
}

impl Hamilton<'_> {
    // false once the count budget is hit
    fn walk(&mut self) -> bool {
        let v = *self.path.last().expect("nonempty");
        if self.path.len() == self.graph.num_vertices() {
            if let Some(m) = self.graph.exponent(v, 0) {
                self.count += 1;
                if self.first.is_none() {
                    let mut exps = self.exps.clone();
                    exps.push(m);
                    self.first = Some((self.path.clone(), exps));
                }
                if self.count >= KLEIN_CYCLE_BUDGET {
                    return false;
                }
            }
            return true;
        }
        for &(w, m) in self.graph.successors(v) {
            if self.used[w] {
                continue;
            }
            self.used[w] = true;
            self.path.push(w);
            self.exps.push(m);
            let go_on = self.walk();
            self.exps.pop();
            self.path.pop();
            self.used[w] = false;
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// Whether the Klein hypersurface with all coefficients 1 is quasi-smooth:
/// false exactly for unit weights, `d = 2` and `n = 2 (mod 4)`.
pub fn klein_quasismooth(fam: &WeightedFamily) -> Result<bool> {
    if fam.degree() < 2 {
        return Err(Error::InvalidFamily("Klein hypersurfaces need d >= 2".into()));
    }
    if klein_exists(fam).is_none() {
        return Err(Error::NoKleinHypersurface);
    }
    let singular = fam.degree() == 2 && fam.weights().iter().all(|&a| a == 1) && fam.dim() % 4 == 2;
    Ok(!singular)
}

/// `R = 1 + sum_{i=1}^{n+1} (-1)^{n-i} prod_{j=i}^{n+1} m_j`, exactly.
pub fn klein_singularity_r(data: &KleinData) -> BigInt {
    let m = &data.exponents;
    let n = m.len() - 2;
    let mut total = BigInt::one();
    let mut tail = BigInt::one();
    for i in (1..=n + 1).rev() {
        tail *= BigInt::from(m[i]);
        // (-1)^{n-i} is +1 exactly when n and i have the same parity
        if (n + i) % 2 == 0 {
            total += &tail;
        } else {
            total -= &tail;
        }
    }
    total
}

/// Outcome of evaluating `(prod m_t + (-1)^{n+1}) / d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KleinMaxPrime {
    Prime { value: u64 },
    NotIntegral { numerator: String, degree: u64 },
    NotPrime { value: String },
    NotGreaterThanDegree { value: u64 },
}

impl KleinMaxPrime {
    pub fn prime(&self) -> Option<u64> {
        match self {
            KleinMaxPrime::Prime { value } => Some(*value),
            _ => None,
        }
    }
}

/// The largest prime order an automorphism can have under coprimality,
/// read off the Klein cycle.
pub fn klein_max_prime(fam: &WeightedFamily) -> Result<KleinMaxPrime> {
    if !fam.weights_coprime_to_degree() {
        return Err(Error::HypothesisViolated(Hypothesis::WeightsCoprimeToDegree));
    }
    let data = klein_exists(fam).ok_or(Error::NoKleinHypersurface)?;
    let n = fam.dim();
    let sign: i64 = if (n + 1) % 2 == 0 { 1 } else { -1 };
    let numerator = BigInt::from(data.product()) + BigInt::from(sign);
    let d = BigInt::from(fam.degree());
    let (value, rem) = numerator.div_rem(&d);
    if !rem.is_zero() {
        return Ok(KleinMaxPrime::NotIntegral {
            numerator: numerator.to_string(),
            degree: fam.degree(),
        });
    }
    // the quotient is 0 for the quadric with unit weights
    let prime = match value.to_biguint() {
        Some(u) if value.is_positive() => is_prime_big(&u)?,
        _ => false,
    };
    if !prime {
        return Ok(KleinMaxPrime::NotPrime {
            value: value.to_string(),
        });
    }
    let v = value.to_u64().ok_or_else(|| Error::PrimalityOutOfRange(value.to_string()))?;
    if v <= fam.degree() {
        return Ok(KleinMaxPrime::NotGreaterThanDegree { value: v });
    }
    Ok(KleinMaxPrime::Prime { value: v })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenspaceReport {
    pub prime: u64,
    pub signature: Signature,
    /// Degree-d monomials `e` with `sigma . e = 0 (mod p)`.
    pub surviving: Vec<Monomial>,
    pub total_monomials: usize,
    /// The surviving monomials are exactly the Klein monomials.
    pub matches: bool,
}

/// Filters all degree-d monomials by the order-`p` signature of the Klein
/// cycle and compares the survivors with the Klein monomials.
pub fn klein_eigenspace_check(fam: &WeightedFamily, monomial_budget: usize) -> Result<EigenspaceReport> {
    if fam.dim() == 2 && !crate::ambient::mm_hypothesis(fam) {
        return Err(Error::HypothesisViolated(Hypothesis::MatsumuraMonsky));
    }
    let p = match klein_max_prime(fam)? {
        KleinMaxPrime::Prime { value } => value,
        other => {
            return Err(Error::HypothesisViolated(match other {
                KleinMaxPrime::NotGreaterThanDegree { .. } => Hypothesis::PrimeExceedsDegree,
                _ => Hypothesis::PrimeOrder,
            }))
        }
    };
    let data = klein_exists(fam).ok_or(Error::NoKleinHypersurface)?;
    let chain = data.chain();
    let signature = signature_from_chain(fam, &chain, p).complete_with(0);
    let all = enumerate_monomials(fam, monomial_budget)?;
    let surviving: Vec<Monomial> = all.eigenspace(signature.sigma(), p, 0).monomials().to_vec();
    let klein = data.system();
    let matches = surviving.as_slice() == klein.monomials();
    Ok(EigenspaceReport {
        prime: p,
        signature,
        surviving,
        total_monomials: all.len(),
        matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::DEFAULT_MONOMIAL_BUDGET;

    fn fam(w: &[u64], d: u64) -> WeightedFamily {
        WeightedFamily::new(w.to_vec(), d).unwrap()
    }

    #[test]
    fn existence() {
        assert!(klein_exists(&fam(&[1, 1, 1, 2], 4)).is_none());
        let k = klein_exists(&fam(&[1, 1, 1], 4)).unwrap();
        assert_eq!(k.ordering, vec![0, 1, 2]);
        assert_eq!(k.exponents, vec![3, 3, 3]);
        assert_eq!(k.cycle_count, 2);
        let k = klein_exists(&fam(&[1; 6], 3)).unwrap();
        assert_eq!(k.exponents, vec![2; 6]);
        assert_eq!(k.cycle_count, 120);
        let k = klein_exists(&fam(&[3, 7, 2, 4, 5], 37));
        assert!(k.is_some());
    }

    #[test]
    fn quasismoothness() {
        assert!(!klein_quasismooth(&fam(&[1, 1, 1, 1], 2)).unwrap());
        assert!(klein_quasismooth(&fam(&[1; 6], 2)).unwrap());
        assert!(klein_quasismooth(&fam(&[1, 1, 1], 4)).unwrap());
        assert_eq!(klein_quasismooth(&fam(&[1, 1, 1, 2], 4)), Err(Error::NoKleinHypersurface));
    }

    #[test]
    fn r_values() {
        let r = |w: &[u64], d| klein_exists(&fam(w, d)).unwrap().r();
        assert_eq!(r(&[1, 1, 1, 1], 2), BigInt::zero());
        assert_eq!(r(&[1, 1, 1], 4), BigInt::from(7));
        assert_eq!(r(&[1, 1, 1, 1, 1, 1], 2), BigInt::zero());
        assert_eq!(r(&[1, 1, 1], 2), BigInt::one());
        // all m_t even makes every product even
        assert_eq!(r(&[1; 5], 3), BigInt::from(1 - 2 + 4 - 8 + 16));
    }

    #[test]
    fn max_primes() {
        assert_eq!(klein_max_prime(&fam(&[1, 1, 1], 4)).unwrap(), KleinMaxPrime::Prime { value: 7 });
        assert_eq!(klein_max_prime(&fam(&[1; 5], 3)).unwrap(), KleinMaxPrime::Prime { value: 11 });
        assert_eq!(klein_max_prime(&fam(&[1; 4], 3)).unwrap(), KleinMaxPrime::Prime { value: 5 });
        assert_eq!(
            klein_max_prime(&fam(&[1; 4], 5)).unwrap(),
            KleinMaxPrime::NotPrime { value: "51".into() }
        );
        assert_eq!(
            klein_max_prime(&fam(&[1; 4], 2)).unwrap(),
            KleinMaxPrime::NotPrime { value: "0".into() }
        );
        assert_eq!(
            klein_max_prime(&fam(&[1, 1, 2], 4)),
            Err(Error::HypothesisViolated(Hypothesis::WeightsCoprimeToDegree))
        );
    }

    #[test]
    fn eigenspaces() {
        let rep = klein_eigenspace_check(&fam(&[1, 1, 1], 4), DEFAULT_MONOMIAL_BUDGET).unwrap();
        assert!(rep.matches);
        assert_eq!(rep.signature.sigma(), &[1, 4, 2]);
        assert_eq!((rep.surviving.len(), rep.total_monomials), (3, 15));
        let rep = klein_eigenspace_check(&fam(&[1; 5], 3), DEFAULT_MONOMIAL_BUDGET).unwrap();
        assert!(rep.matches);
        assert_eq!((rep.surviving.len(), rep.total_monomials), (5, 35));
        assert_eq!(
            klein_eigenspace_check(&fam(&[1; 4], 5), DEFAULT_MONOMIAL_BUDGET),
            Err(Error::HypothesisViolated(Hypothesis::PrimeOrder))
        );
    }
}
