//! Weight systems, their hypothesis predicates and degree-d monomials.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::arith::gcd_all;
use crate::error::{Error, Result};

/// Default cap on the number of monomials [`enumerate_monomials`] may produce.
pub const DEFAULT_MONOMIAL_BUDGET: usize = 10_000_000;

/// Weights `a = (a_0, ..., a_{n+1})` together with a degree `d`.
///
/// Weights are kept in input order. Construction enforces `n >= 1`, positive
/// weights, `gcd(a) = 1` and `d >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightedFamily {
    weights: Vec<u64>,
    degree: u64,
}

impl WeightedFamily {
    pub fn new(weights: Vec<u64>, degree: u64) -> Result<Self> {
        if weights.len() < 3 {
            return Err(Error::InvalidFamily(format!(
                "need at least 3 weights (n >= 1), got {}",
                weights.len()
            )));
        }
        if weights.contains(&0) {
            return Err(Error::InvalidFamily("weights must be positive".into()));
        }
        if degree == 0 {
            return Err(Error::InvalidFamily("degree must be positive".into()));
        }
        let g = gcd_all(&weights)?;
        if g != 1 {
            return Err(Error::InvalidFamily(format!("gcd of the weights is {g}, not 1")));
        }
        Ok(Self { weights, degree })
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> u64 {
        self.weights[i]
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// Number of variables, `n + 2`.
    pub fn num_vars(&self) -> usize {
        self.weights.len()
    }

    /// Dimension of the hypersurface.
    pub fn dim(&self) -> usize {
        self.weights.len() - 2
    }

    pub fn max_weight(&self) -> u64 {
        *self.weights.iter().max().expect("nonempty")
    }

    pub fn weighted_degree(&self, exponents: &[u32]) -> u64 {
        self.weights
            .iter()
            .zip(exponents)
            .map(|(&a, &e)| a * e as u64)
            .sum()
    }

    pub fn all_weights_divide_degree(&self) -> bool {
        self.weights.iter().all(|&a| self.degree % a == 0)
    }

    pub fn weights_coprime_to_degree(&self) -> bool {
        self.weights.iter().all(|&a| a.gcd(&self.degree) == 1)
    }

    /// Multiplicity of each weight value.
    pub fn multiplicities(&self) -> BTreeMap<u64, usize> {
        let mut m = BTreeMap::new();
        for &a in &self.weights {
            *m.entry(a).or_insert(0) += 1;
        }
        m
    }
}

impl fmt::Display for WeightedFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ws: Vec<String> = self.weights.iter().map(u64::to_string).collect();
        write!(f, "{} d={}", ws.join(","), self.degree)
    }
}

/// Parses the text form `"3,7,2,4,5 d=37"`.
impl FromStr for WeightedFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let ws = parts
            .next()
            .ok_or_else(|| Error::Parse("missing weights".into()))?;
        let deg = parts
            .next()
            .ok_or_else(|| Error::Parse("missing degree (expected `d=<degree>`)".into()))?;
        if parts.next().is_some() {
            return Err(Error::Parse(format!("trailing input in {s:?}")));
        }
        let weights = parse_weights(ws)?;
        let degree = deg
            .strip_prefix("d=")
            .ok_or_else(|| Error::Parse(format!("expected `d=<degree>`, got {deg:?}")))?
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("bad degree {deg:?}: {e}")))?;
        WeightedFamily::new(weights, degree)
    }
}

/// Parses a comma-separated list of positive integers.
pub fn parse_weights(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|w| {
            w.trim()
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("bad weight {w:?}: {e}")))
        })
        .collect()
}

/// Exponent vector of a monomial `x_0^{e_0} ... x_{n+1}^{e_{n+1}}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    /// Bitmask of the variables that occur.
    pub fn support(&self) -> u32 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    /// `x_i^k` with `k` at position `i`.
    pub fn pure_power(num_vars: usize, i: usize, k: u32) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = k;
        Self(e)
    }

    /// `x_i^k x_j`.
    pub fn near_power(num_vars: usize, i: usize, k: u32, j: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = k;
        e[j] += 1;
        Self(e)
    }

    /// `sum_i sigma_i e_i mod q`.
    pub fn character(&self, sigma: &[u64], q: u64) -> u64 {
        let s: u128 = self
            .0
            .iter()
            .zip(sigma)
            .map(|(&e, &s)| e as u128 * s as u128)
            .sum();
        (s % q as u128) as u64
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{i}")?;
            } else {
                write!(f, "x{i}^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

/// A duplicate-free set of degree-d monomials of one family.
///
/// Monomials are kept in decreasing lexicographic order (`x_0 > x_1 > ...`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialSystem {
    family: WeightedFamily,
    monomials: Vec<Monomial>,
}

impl MonomialSystem {
    pub fn new(family: WeightedFamily, mut monomials: Vec<Monomial>) -> Result<Self> {
        for m in &monomials {
            if m.num_vars() != family.num_vars() {
                return Err(Error::InvalidFamily(format!(
                    "monomial {m} has {} variables, family has {}",
                    m.num_vars(),
                    family.num_vars()
                )));
            }
            let deg = family.weighted_degree(m.exponents());
            if deg != family.degree() {
                return Err(Error::WrongDegree {
                    expected: family.degree(),
                    found: deg,
                });
            }
        }
        monomials.sort_unstable_by(|a, b| b.cmp(a));
        monomials.dedup();
        Ok(Self { family, monomials })
    }

    pub fn family(&self) -> &WeightedFamily {
        &self.family
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.monomials.binary_search_by(|x| m.cmp(x)).is_ok()
    }

    /// Subsystem of monomials `e` with `sigma . e = h (mod q)`.
    pub fn eigenspace(&self, sigma: &[u64], q: u64, h: u64) -> MonomialSystem {
        let monomials = self
            .monomials
            .iter()
            .filter(|m| m.character(sigma, q) == h % q)
            .cloned()
            .collect();
        MonomialSystem {
            family: self.family.clone(),
            monomials,
        }
    }

    /// Subsystem of monomials supported inside `mask`.
    pub fn restricted_to(&self, mask: u32) -> MonomialSystem {
        let monomials = self
            .monomials
            .iter()
            .filter(|m| m.support() & !mask == 0)
            .cloned()
            .collect();
        MonomialSystem {
            family: self.family.clone(),
            monomials,
        }
    }
}

/// `gcd` of every weight except `a_i` equals 1, for every `i`.
pub fn well_formed(fam: &WeightedFamily) -> bool {
    (0..fam.num_vars()).all(|i| gcd_without(fam.weights(), i) == 1)
}

fn gcd_without(weights: &[u64], skip: usize) -> u64 {
    weights
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != skip)
        .fold(0u64, |g, (_, &a)| g.gcd(&a))
}

/// Replaces the family by an isomorphic well-formed one.
///
/// While some `g = gcd(a_j : j != i) > 1`, divides those weights and `d` by
/// `g`; fails when `g` does not divide `d`.
pub fn well_form_normalize(fam: &WeightedFamily) -> Result<WeightedFamily> {
    let mut weights = fam.weights().to_vec();
    let mut degree = fam.degree();
    loop {
        let step = (0..weights.len())
            .map(|i| (i, gcd_without(&weights, i)))
            .find(|&(_, g)| g > 1);
        let Some((i, g)) = step else { break };
        if degree % g != 0 {
            return Err(Error::NotNormalizable { index: i, gcd: g, degree });
        }
        for (j, a) in weights.iter_mut().enumerate() {
            if j != i {
                *a /= g;
            }
        }
        degree /= g;
    }
    WeightedFamily::new(weights, degree)
}

/// `n >= 3`, or `n = 2` with `a_0 + a_1 + a_2 + a_3 != d`.
pub fn mm_hypothesis(fam: &WeightedFamily) -> bool {
    match fam.dim() {
        0 | 1 => false,
        2 => fam.weights().iter().sum::<u64>() != fam.degree(),
        _ => true,
    }
}

/// Linear automorphism group finite: `d > 2 max(a)`, or equality with a unique maximum.
pub fn lin_finite(fam: &WeightedFamily) -> bool {
    let max = fam.max_weight();
    let d = fam.degree();
    if d > 2 * max {
        return true;
    }
    d == 2 * max && fam.weights().iter().filter(|&&a| a == max).count() == 1
}

pub fn is_linear_cone(fam: &WeightedFamily) -> bool {
    fam.weights().contains(&fam.degree())
}

/// All exponent vectors of weighted degree `d`, decreasing lexicographically.
pub fn enumerate_monomials(fam: &WeightedFamily, budget: usize) -> Result<MonomialSystem> {
    let n = fam.num_vars();
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fill(fam.weights(), 0, fam.degree(), &mut current, &mut out, budget)?;
    Ok(MonomialSystem {
        family: fam.clone(),
        monomials: out,
    })
}

fn fill(
    weights: &[u64],
    pos: usize,
    remaining: u64,
    current: &mut Vec<u32>,
    out: &mut Vec<Monomial>,
    budget: usize,
) -> Result<()> {
    let a = weights[pos];
    if pos + 1 == weights.len() {
        if remaining % a == 0 {
            if out.len() >= budget {
                return Err(Error::BudgetExceeded {
                    what: "monomial enumeration",
                    limit: budget as u64,
                });
            }
            current[pos] = (remaining / a) as u32;
            out.push(Monomial(current.clone()));
            current[pos] = 0;
        }
        return Ok(());
    }
    for e in (0..=remaining / a).rev() {
        current[pos] = e as u32;
        fill(weights, pos + 1, remaining - e * a, current, out, budget)?;
    }
    current[pos] = 0;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(w: &[u64], d: u64) -> WeightedFamily {
        WeightedFamily::new(w.to_vec(), d).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(WeightedFamily::new(vec![1, 1], 3).is_err());
        assert!(WeightedFamily::new(vec![2, 4, 6], 12).is_err());
        assert!(WeightedFamily::new(vec![1, 0, 1], 2).is_err());
        assert!(WeightedFamily::new(vec![1, 1, 1], 0).is_err());
    }

    #[test]
    fn text_form() {
        let f: WeightedFamily = "3,7,2,4,5 d=37".parse().unwrap();
        assert_eq!(f.weights(), &[3, 7, 2, 4, 5]);
        assert_eq!(f.degree(), 37);
        assert_eq!(f.to_string(), "3,7,2,4,5 d=37");
        assert!("3,7,2 37".parse::<WeightedFamily>().is_err());
        assert!("3,x,2 d=4".parse::<WeightedFamily>().is_err());
    }

    #[test]
    fn well_formed_examples() {
        assert!(well_formed(&fam(&[1, 1, 1, 2, 3], 6)));
        assert!(!well_formed(&fam(&[1, 2, 2, 2], 4)));
        assert!(well_formed(&fam(&[3, 7, 2, 4, 5], 37)));
    }

    #[test]
    fn normalize_examples() {
        let f = fam(&[1, 1, 1, 2, 3], 6);
        assert_eq!(well_form_normalize(&f).unwrap(), f);
        let g = well_form_normalize(&fam(&[1, 2, 2, 2], 4)).unwrap();
        assert_eq!(g.weights(), &[1, 1, 1, 1]);
        assert_eq!(g.degree(), 2);
        let h = fam(&[1, 1, 1], 3);
        assert_eq!(well_form_normalize(&h).unwrap(), h);
        assert!(matches!(
            well_form_normalize(&fam(&[1, 2, 2, 2], 5)),
            Err(Error::NotNormalizable { .. })
        ));
    }

    #[test]
    fn hypothesis_predicates() {
        assert!(mm_hypothesis(&fam(&[1, 1, 1, 2, 3], 6)));
        assert!(!mm_hypothesis(&fam(&[1, 1, 1, 1], 4)));
        assert!(mm_hypothesis(&fam(&[1, 1, 1, 1], 3)));

        assert!(lin_finite(&fam(&[1, 1, 1, 2, 3], 6)));
        assert!(lin_finite(&fam(&[1, 1, 1, 1, 1], 3)));
        assert!(!lin_finite(&fam(&[1, 1, 2, 2], 4)));

        assert!(is_linear_cone(&fam(&[1, 1, 1, 2, 3], 3)));
        assert!(!is_linear_cone(&fam(&[1, 1, 1, 2, 3], 6)));
        assert!(is_linear_cone(&fam(&[1, 1, 1], 1)));
    }

    #[test]
    fn enumeration_examples() {
        let m = enumerate_monomials(&fam(&[1, 1, 1], 2), 100).unwrap();
        assert_eq!(m.len(), 6);
        let two = enumerate_monomials(&fam(&[1, 1, 1], 4), 100).unwrap();
        assert_eq!(two.len(), 15);

        let f = fam(&[3, 7, 2, 4, 5], 37);
        let sys = enumerate_monomials(&f, DEFAULT_MONOMIAL_BUDGET).unwrap();
        for e in [[10, 1, 0, 0, 0], [0, 5, 1, 0, 0], [1, 0, 17, 0, 0]] {
            assert!(sys.contains(&Monomial(e.to_vec())), "missing {e:?}");
        }
        assert!(sys.monomials().iter().all(|m| f.weighted_degree(m.exponents()) == 37));
        assert!(sys.monomials().windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn enumeration_budget() {
        let f = fam(&[1, 1, 1], 4);
        assert!(matches!(
            enumerate_monomials(&f, 10),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn system_rejects_wrong_degree() {
        let f = fam(&[1, 1, 1], 3);
        assert!(MonomialSystem::new(f.clone(), vec![Monomial(vec![1, 1, 0])]).is_err());
        let s = MonomialSystem::new(
            f,
            vec![Monomial(vec![1, 1, 1]), Monomial(vec![3, 0, 0]), Monomial(vec![1, 1, 1])],
        )
        .unwrap();
        assert_eq!(s.len(), 2);
    }
}
