//! Finite-field search for singular points of the affine cone of an explicit polynomial.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ambient::{Monomial, MonomialSystem};
use crate::arith::{inverse_mod, is_prime, mul_mod};
use crate::error::{Error, Result};

/// A polynomial with explicit nonzero rational coefficients on the monomials of a system.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitPolynomial {
    system: MonomialSystem,
    coefficients: BTreeMap<Monomial, BigRational>,
}

impl ExplicitPolynomial {
    /// Monomials without an entry in `coefficients` are treated as absent.
    pub fn new(system: MonomialSystem, coefficients: BTreeMap<Monomial, BigRational>) -> Result<Self> {
        for (m, c) in &coefficients {
            if !system.contains(m) {
                return Err(Error::InvalidFamily(format!("monomial {m} is not in the system")));
            }
            if c.is_zero() {
                return Err(Error::InvalidFamily(format!("zero coefficient on {m}")));
            }
        }
        Ok(Self {
            system,
            coefficients,
        })
    }

    /// Every monomial of the system with coefficient 1.
    pub fn unit_coefficients(system: MonomialSystem) -> Self {
        let coefficients = system
            .monomials()
            .iter()
            .map(|m| (m.clone(), BigRational::one()))
            .collect();
        Self {
            system,
            coefficients,
        }
    }

    /// Every monomial of the system with an integer coefficient drawn uniformly from `1..=100`.
    pub fn random_member(system: MonomialSystem, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coefficients = system
            .monomials()
            .iter()
            .map(|m| {
                let c: i64 = rng.gen_range(1..=100);
                (m.clone(), BigRational::from_integer(BigInt::from(c)))
            })
            .collect();
        Self {
            system,
            coefficients,
        }
    }

    pub fn system(&self) -> &MonomialSystem {
        &self.system
    }

    pub fn coefficients(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.coefficients
    }

    /// Coefficients reduced into `F_p`; fails if any of them vanishes there.
    pub fn reduce(&self, p: u64) -> Result<Vec<(Vec<u32>, u64)>> {
        self.coefficients
            .iter()
            .map(|(m, c)| {
                let collision = || Error::CoefficientCollision {
                    monomial: m.0.clone(),
                    prime: p,
                };
                let num = residue(c.numer(), p);
                let den = residue(c.denom(), p);
                if num == 0 || den == 0 {
                    return Err(collision());
                }
                let inv = inverse_mod(den, p).ok_or_else(collision)?;
                Ok((m.0.clone(), mul_mod(num, inv, p)))
            })
            .collect()
    }
}

fn residue(x: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = ((x % &m) + &m) % &m;
    debug_assert!(!r.is_negative());
    r.to_u64().expect("residue fits")
}

/// How the points of a search were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStrategy {
    /// Every nonzero point of `F_p^N`.
    Exhaustive,
    /// Random affine planes, lines and points, in that order while the budget allows.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    /// Nonzero point of the cone where the polynomial and every partial derivative vanish.
    pub witness: Option<Vec<u64>>,
    pub points_checked: u64,
    pub strategy: SearchStrategy,
    /// The whole cone was examined; `witness = None` then holds over this field.
    pub exhaustive: bool,
    pub budget_exhausted: bool,
    pub prime: u64,
    pub seed: u64,
}

struct Evaluator {
    p: u64,
    terms: Vec<(Vec<u32>, u64)>,
    max_exp: usize,
    powers: Vec<Vec<u64>>,
}

impl Evaluator {
    fn new(p: u64, terms: Vec<(Vec<u32>, u64)>, num_vars: usize) -> Self {
        let max_exp = terms
            .iter()
            .flat_map(|(e, _)| e.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        Self {
            p,
            terms,
            max_exp,
            powers: vec![vec![0; max_exp + 1]; num_vars],
        }
    }

    fn is_singular(&mut self, x: &[u64]) -> bool {
        let p = self.p;
        for (i, &xi) in x.iter().enumerate() {
            let row = &mut self.powers[i];
            row[0] = 1;
            for k in 1..=self.max_exp {
                row[k] = mul_mod(row[k - 1], xi, p);
            }
        }
        let mut value = 0u64;
        let mut grad = vec![0u64; x.len()];
        for (e, c) in &self.terms {
            let mut term = *c;
            for (i, &k) in e.iter().enumerate() {
                term = mul_mod(term, self.powers[i][k as usize], p);
            }
            value = (value + term) % p;
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let mut part = mul_mod(*c, k as u64 % p, p);
                for (j, &kj) in e.iter().enumerate() {
                    let pw = if j == i { kj - 1 } else { kj };
                    part = mul_mod(part, self.powers[j][pw as usize], p);
                    if part == 0 {
                        break;
                    }
                }
                grad[i] = (grad[i] + part) % p;
            }
        }
        value == 0 && grad.iter().all(|&g| g == 0)
    }
}

/// Looks for a nonzero point of `F_p^N` where `poly` and all its partial derivatives vanish.
///
/// The search is exhaustive when `p^N - 1 <= budget`. Otherwise it samples
/// random affine planes, then random affine lines, then random points, from a
/// generator seeded with `seed`. A witness shows the reduction mod `p` is not
/// quasi-smooth; no witness proves nothing unless the search was exhaustive.
pub fn singular_point_search(
    poly: &ExplicitPolynomial,
    prime: u64,
    budget: u64,
    seed: u64,
) -> Result<SearchOutcome> {
    if !is_prime(prime) {
        return Err(Error::NotPrime(prime));
    }
    let n = poly.system().family().num_vars();
    let terms = poly.reduce(prime)?;
    let mut eval = Evaluator::new(prime, terms, n);
    let cone_size = (prime as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let exhaustive = cone_size - 1 <= budget as u128;

    let mut outcome = SearchOutcome {
        witness: None,
        points_checked: 0,
        strategy: if exhaustive {
            SearchStrategy::Exhaustive
        } else {
            SearchStrategy::Sampled
        },
        exhaustive: false,
        budget_exhausted: false,
        prime,
        seed,
    };

    if exhaustive {
        let mut x = vec![0u64; n];
        while advance(&mut x, prime) {
            outcome.points_checked += 1;
            if eval.is_singular(&x) {
                outcome.witness = Some(x);
                return Ok(outcome);
            }
        }
        outcome.exhaustive = true;
        return Ok(outcome);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_vec = |rng: &mut ChaCha8Rng| -> Vec<u64> { (0..n).map(|_| rng.gen_range(0..prime)).collect() };
    let p2 = prime.saturating_mul(prime);
    let mut remaining = budget;

    while remaining >= p2 && p2 > 0 {
        let base = random_vec(&mut rng);
        let u = random_vec(&mut rng);
        let v = random_vec(&mut rng);
        for s in 0..prime {
            for t in 0..prime {
                let x: Vec<u64> = (0..n)
                    .map(|i| (base[i] + mul_mod(s, u[i], prime) + mul_mod(t, v[i], prime)) % prime)
                    .collect();
                if let Some(w) = check(&mut eval, x, &mut outcome) {
                    outcome.witness = Some(w);
                    return Ok(outcome);
                }
            }
        }
        remaining -= p2;
    }
    while remaining >= prime {
        let base = random_vec(&mut rng);
        let u = random_vec(&mut rng);
        for s in 0..prime {
            let x: Vec<u64> = (0..n)
                .map(|i| (base[i] + mul_mod(s, u[i], prime)) % prime)
                .collect();
            if let Some(w) = check(&mut eval, x, &mut outcome) {
                outcome.witness = Some(w);
                return Ok(outcome);
            }
        }
        remaining -= prime;
    }
    while remaining > 0 {
        let x = random_vec(&mut rng);
        if let Some(w) = check(&mut eval, x, &mut outcome) {
            outcome.witness = Some(w);
            return Ok(outcome);
        }
        remaining -= 1;
    }
    outcome.budget_exhausted = true;
    Ok(outcome)
}

fn check(eval: &mut Evaluator, x: Vec<u64>, outcome: &mut SearchOutcome) -> Option<Vec<u64>> {
    if x.iter().all(|&c| c == 0) {
        return None;
    }
    outcome.points_checked += 1;
    eval.is_singular(&x).then_some(x)
}

// Odometer increment; false once the counter wraps back to zero.
fn advance(x: &mut [u64], p: u64) -> bool {
    for c in x.iter_mut() {
        *c += 1;
        if *c < p {
            return true;
        }
        *c = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::WeightedFamily;

    fn poly(w: &[u64], d: u64, ms: &[&[u32]]) -> ExplicitPolynomial {
        let fam = WeightedFamily::new(w.to_vec(), d).unwrap();
        let sys = MonomialSystem::new(fam, ms.iter().map(|e| Monomial(e.to_vec())).collect()).unwrap();
        ExplicitPolynomial::unit_coefficients(sys)
    }

    fn klein_quadric() -> ExplicitPolynomial {
        poly(
            &[1, 1, 1, 1],
            2,
            &[&[1, 1, 0, 0], &[0, 1, 1, 0], &[0, 0, 1, 1], &[1, 0, 0, 1]],
        )
    }

    #[test]
    fn klein_quadric_is_singular_mod_5() {
        let out = singular_point_search(&klein_quadric(), 5, 1_000, 0).unwrap();
        assert!(out.exhaustive || out.witness.is_some());
        let w = out.witness.expect("witness");
        // the cone is singular exactly along x0 + x2 = x1 + x3 = 0
        assert_eq!((w[0] + w[2]) % 5, 0);
        assert_eq!((w[1] + w[3]) % 5, 0);
    }

    #[test]
    fn klein_quadric_sampled_over_large_prime() {
        let out = singular_point_search(&klein_quadric(), 997, 5_000_000, 7).unwrap();
        assert_eq!(out.strategy, SearchStrategy::Sampled);
        assert!(out.witness.is_some());
    }

    #[test]
    fn fermat_has_no_singular_point_mod_7() {
        let p = poly(
            &[1, 1, 1, 2, 3],
            6,
            &[
                &[6, 0, 0, 0, 0],
                &[0, 6, 0, 0, 0],
                &[0, 0, 6, 0, 0],
                &[0, 0, 0, 3, 0],
                &[0, 0, 0, 0, 2],
            ],
        );
        let out = singular_point_search(&p, 7, 100_000, 0).unwrap();
        assert!(out.exhaustive);
        assert_eq!(out.witness, None);
        assert_eq!(out.points_checked, 7u64.pow(5) - 1);
    }

    #[test]
    fn zero_budget_reports_exhaustion() {
        let out = singular_point_search(&klein_quadric(), 101, 0, 0).unwrap();
        assert_eq!(out.witness, None);
        assert!(out.budget_exhausted);
        assert!(!out.exhaustive);
        assert_eq!(out.points_checked, 0);
    }

    #[test]
    fn reducible_cycle_is_singular() {
        // x0x2 + x1x2 + x0x3 + x1x3 = (x0 + x1)(x2 + x3) with weights (1,1,2,2), d = 3
        let p = poly(
            &[1, 1, 2, 2],
            3,
            &[&[1, 0, 1, 0], &[0, 1, 1, 0], &[1, 0, 0, 1], &[0, 1, 0, 1]],
        );
        let out = singular_point_search(&p, 11, 100_000, 0).unwrap();
        assert!(out.witness.is_some());
    }

    #[test]
    fn collisions_and_bad_primes() {
        let p = klein_quadric();
        assert_eq!(singular_point_search(&p, 4, 10, 0), Err(Error::NotPrime(4)));
        let mut coeffs = p.coefficients().clone();
        let first = coeffs.keys().next().unwrap().clone();
        coeffs.insert(first.clone(), BigRational::from_integer(BigInt::from(101)));
        let q = ExplicitPolynomial::new(p.system().clone(), coeffs).unwrap();
        assert_eq!(
            singular_point_search(&q, 101, 10, 0),
            Err(Error::CoefficientCollision {
                monomial: first.0.clone(),
                prime: 101
            })
        );
        let r = BigRational::new(BigInt::from(3), BigInt::from(2));
        let mut coeffs = p.coefficients().clone();
        coeffs.insert(first, r);
        let q = ExplicitPolynomial::new(p.system().clone(), coeffs).unwrap();
        // 3/2 = 4 mod 5 makes the Gram determinant 3, so the quadric is smooth
        let out = singular_point_search(&q, 5, 1_000, 0).unwrap();
        assert!(out.exhaustive);
        assert_eq!(out.witness, None);
    }

    #[test]
    fn random_members_are_reproducible() {
        let sys = klein_quadric().system().clone();
        let a = ExplicitPolynomial::random_member(sys.clone(), 3);
        let b = ExplicitPolynomial::random_member(sys, 3);
        assert_eq!(a, b);
        assert!(a.coefficients().values().all(|c| !c.is_zero()));
    }
}
