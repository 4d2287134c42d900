use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Pow;
use serde::Serialize;

use crate::ambient::WeightedFamily;
use crate::error::{Error, Hypothesis, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Every weight divides `d`; primes above the bound are excluded.
    DividesD,
    /// Every weight is coprime to `d`; primes `p > d` at or above the bound are excluded.
    Coprime,
}

/// An upper bound on the prime orders of automorphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub kind: BoundKind,
    /// Exact value; an integer for [`BoundKind::DividesD`].
    pub bound: BigRational,
    /// Number of occurrences of each weight value.
    pub multiplicities: BTreeMap<u64, usize>,
    pub max_weight: u64,
    pub degree: u64,
}

impl BoundReport {
    /// Whether the bound alone excludes automorphisms of prime order `p`.
    pub fn refutes(&self, p: u64) -> bool {
        let p_big = BigRational::from_integer(BigInt::from(p));
        match self.kind {
            BoundKind::DividesD => p_big > self.bound,
            BoundKind::Coprime => p > self.degree && p_big >= self.bound,
        }
    }

    /// The largest prime the bound leaves open, clamped to `u64`.
    pub fn largest_open(&self) -> u64 {
        let floor = self.bound.floor().to_integer();
        let floor = u64::try_from(floor).unwrap_or(u64::MAX);
        match self.kind {
            BoundKind::DividesD => floor,
            BoundKind::Coprime => {
                let below = if self.bound.is_integer() { floor.saturating_sub(1) } else { floor };
                below.max(self.degree)
            }
        }
    }

    /// `"25"` or `"32/3"`.
    pub fn bound_string(&self) -> String {
        if self.bound.is_integer() {
            self.bound.to_integer().to_string()
        } else {
            format!("{}/{}", self.bound.numer(), self.bound.denom())
        }
    }
}

/// `max{d, (d/a_i - 1)^{n_i - 1}}` with `n_i` the multiplicity of `a_i`.
pub fn bound_divides_d(fam: &WeightedFamily) -> Result<BoundReport> {
    if !fam.all_weights_divide_degree() {
        return Err(Error::HypothesisViolated(Hypothesis::WeightsDivideDegree));
    }
    let d = fam.degree();
    let multiplicities = fam.multiplicities();
    let mut bound = BigInt::from(d);
    for (&w, &count) in &multiplicities {
        let base = BigInt::from(d / w - 1);
        let value: BigInt = Pow::pow(&base, (count - 1) as u32);
        if value > bound {
            bound = value;
        }
    }
    Ok(BoundReport {
        kind: BoundKind::DividesD,
        bound: BigRational::from_integer(bound),
        multiplicities,
        max_weight: fam.max_weight(),
        degree: d,
    })
}

/// `max(a) / (d - max(a)) * prod_t (d - a_t) / a_t`, exactly.
pub fn bound_coprime(fam: &WeightedFamily) -> Result<BoundReport> {
    if !fam.weights_coprime_to_degree() {
        return Err(Error::HypothesisViolated(Hypothesis::WeightsCoprimeToDegree));
    }
    let d = fam.degree();
    let max = fam.max_weight();
    if d <= max {
        return Err(Error::HypothesisViolated(Hypothesis::FiniteLinearAutomorphisms));
    }
    let rat = |num: u64, den: u64| BigRational::new(BigInt::from(num), BigInt::from(den));
    let mut bound = rat(max, d - max);
    for &a in fam.weights() {
        bound *= rat(d - a, a);
    }
    Ok(BoundReport {
        kind: BoundKind::Coprime,
        bound,
        multiplicities: fam.multiplicities(),
        max_weight: max,
        degree: d,
    })
}
