//! JSON reports. Field order is fixed by the struct definitions, so the same
//! input, seed and budgets always serialize to the same bytes.

use serde::Serialize;

use wpaut::ambient::{is_linear_cone, lin_finite, mm_hypothesis, well_formed};
use wpaut::klein::{
    klein_eigenspace_check, klein_exists, klein_max_prime, klein_quasismooth, KleinMaxPrime,
};
use wpaut::orders::{
    bound_coprime, bound_divides_d, off_chain_constraints, signature_from_chain, BoundReport,
    Budgets, CycleChain, OrderVerdict, Status,
};
use wpaut::quasismooth::{exists_quasismooth, SearchOutcome};
use wpaut::{Monomial, WeightedFamily};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct QueryReport {
    pub weights: Vec<u64>,
    pub degree: u64,
    pub hypotheses: Hypotheses,
    pub verdicts: Vec<VerdictJson>,
    pub bounds: Bounds,
    pub klein: Option<KleinJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explain: Option<Explain>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub falsifier: Option<SearchOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub seed: u64,
    pub version: &'static str,
    pub budgets: Budgets,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl QueryReport {
    pub fn new(fam: &WeightedFamily, seed: u64, budgets: Budgets) -> Self {
        Self {
            weights: fam.weights().to_vec(),
            degree: fam.degree(),
            hypotheses: Hypotheses::of(fam),
            verdicts: Vec::new(),
            bounds: Bounds::of(fam),
            klein: None,
            explain: None,
            falsifier: None,
            error: None,
            seed,
            version: VERSION,
            budgets,
            timings: None,
        }
    }

    pub fn any_status(&self, status: Status) -> bool {
        self.verdicts.iter().any(|v| v.status == status.as_str())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Hypotheses {
    pub degree_at_least_three: bool,
    pub well_formed: bool,
    pub mm_hypothesis: bool,
    pub lin_finite: bool,
    pub linear_cone: bool,
    /// Null when the family is not well-formed.
    pub quasismooth_member: Option<bool>,
}

impl Hypotheses {
    pub fn of(fam: &WeightedFamily) -> Self {
        let wf = well_formed(fam);
        Self {
            degree_at_least_three: fam.degree() >= 3,
            well_formed: wf,
            mm_hypothesis: mm_hypothesis(fam),
            lin_finite: lin_finite(fam),
            linear_cone: is_linear_cone(fam),
            quasismooth_member: if wf { exists_quasismooth(fam).ok() } else { None },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainJson {
    pub indices: Vec<usize>,
    pub exponents: Vec<u64>,
}

impl From<&CycleChain> for ChainJson {
    fn from(c: &CycleChain) -> Self {
        Self {
            indices: c.indices().to_vec(),
            exponents: c.exponents().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictJson {
    pub q: u64,
    pub p: u64,
    pub r: u32,
    pub status: &'static str,
    pub provenance: &'static str,
    pub chain: Option<ChainJson>,
    pub signature: Option<Vec<u64>>,
    pub eigenvalue: Option<u64>,
    pub witness_monomials: Option<Vec<Monomial>>,
    pub notes: Vec<String>,
}

impl From<&OrderVerdict> for VerdictJson {
    fn from(v: &OrderVerdict) -> Self {
        Self {
            q: v.order.q(),
            p: v.order.p(),
            r: v.order.r(),
            status: v.status.as_str(),
            provenance: v.provenance.as_str(),
            chain: v.chain.as_ref().map(ChainJson::from),
            signature: v.signature.as_ref().map(|s| s.sigma().to_vec()),
            eigenvalue: v.eigenvalue,
            witness_monomials: v.witness_system.as_ref().map(|w| w.monomials().to_vec()),
            notes: v.notes.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundJson {
    /// Exact value, an integer or a reduced fraction.
    pub bound: String,
    /// Largest prime not refuted by the bound.
    pub largest_open: u64,
}

impl From<&BoundReport> for BoundJson {
    fn from(b: &BoundReport) -> Self {
        Self {
            bound: b.bound_string(),
            largest_open: b.largest_open(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Bounds {
    pub divides_d: Option<BoundJson>,
    pub coprime: Option<BoundJson>,
}

impl Bounds {
    pub fn of(fam: &WeightedFamily) -> Self {
        Self {
            divides_d: bound_divides_d(fam).ok().as_ref().map(BoundJson::from),
            coprime: bound_coprime(fam).ok().as_ref().map(BoundJson::from),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenspaceJson {
    pub prime: u64,
    pub signature: Vec<u64>,
    pub surviving: usize,
    pub total_monomials: usize,
    pub surviving_monomials: Vec<Monomial>,
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KleinJson {
    pub exists: bool,
    pub ordering: Option<Vec<usize>>,
    pub exponents: Option<Vec<u64>>,
    pub monomials: Option<Vec<Monomial>>,
    pub cycle_count: Option<u64>,
    pub count_complete: Option<bool>,
    pub quasismooth: Option<bool>,
    pub singularity_r: Option<String>,
    pub max_prime: Option<KleinMaxPrime>,
    pub max_prime_error: Option<String>,
    pub eigenspace_check: Option<EigenspaceJson>,
    pub eigenspace_error: Option<String>,
}

impl KleinJson {
    pub fn of(fam: &WeightedFamily, monomial_budget: usize) -> Self {
        let Some(k) = klein_exists(fam) else {
            return Self {
                exists: false,
                ordering: None,
                exponents: None,
                monomials: None,
                cycle_count: None,
                count_complete: None,
                quasismooth: None,
                singularity_r: None,
                max_prime: None,
                max_prime_error: None,
                eigenspace_check: None,
                eigenspace_error: None,
            };
        };
        let (max_prime, max_prime_error) = split(klein_max_prime(fam));
        let (eig, eigenspace_error) = split(klein_eigenspace_check(fam, monomial_budget));
        Self {
            exists: true,
            ordering: Some(k.ordering.clone()),
            exponents: Some(k.exponents.clone()),
            monomials: Some(k.monomials()),
            cycle_count: Some(k.cycle_count),
            count_complete: Some(k.count_complete),
            quasismooth: klein_quasismooth(fam).ok(),
            singularity_r: Some(k.r().to_string()),
            max_prime,
            max_prime_error,
            eigenspace_check: eig.map(|r| EigenspaceJson {
                prime: r.prime,
                signature: r.signature.sigma().to_vec(),
                surviving: r.surviving.len(),
                total_monomials: r.total_monomials,
                surviving_monomials: r.surviving,
                matches: r.matches,
            }),
            eigenspace_error,
        }
    }
}

fn split<T>(r: wpaut::Result<T>) -> (Option<T>, Option<String>) {
    match r {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstraintJson {
    pub variable: usize,
    pub monomial: String,
    /// `k sigma_j + sigma_i = 0 (mod q)` written out.
    pub equation: String,
    pub solutions: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Explain {
    pub chain: Option<ChainJson>,
    /// Chain residues, `*` where unconstrained.
    pub signature_prefix: Option<String>,
    pub constraints: Vec<ConstraintJson>,
    /// Off-chain variables whose listed constraints share no solution.
    pub disjoint_solutions: Vec<usize>,
    pub note: Option<String>,
}

impl Explain {
    pub fn of(fam: &WeightedFamily, chain: Option<&CycleChain>, q: u64) -> Self {
        let Some(chain) = chain else {
            return Self {
                chain: None,
                signature_prefix: None,
                constraints: Vec::new(),
                disjoint_solutions: Vec::new(),
                note: Some("no cycle satisfies the product congruence".into()),
            };
        };
        let sig = signature_from_chain(fam, chain, q);
        let raw = off_chain_constraints(fam, chain, &sig);
        let constraints = raw
            .iter()
            .map(|c| {
                let lhs = match c.partner {
                    Some(i) => format!("{}σ{}+σ{}", c.coefficient, c.variable, i),
                    None => format!("{}σ{}", c.coefficient, c.variable),
                };
                ConstraintJson {
                    variable: c.variable,
                    monomial: c.monomial.to_string(),
                    equation: format!("{lhs} ≡ 0 (mod {q})"),
                    solutions: c.solutions.clone(),
                }
            })
            .collect();
        let mut disjoint: Vec<usize> = raw.iter().map(|c| c.variable).collect();
        disjoint.dedup();
        disjoint.retain(|&j| {
            let mut sets = raw.iter().filter(|c| c.variable == j).map(|c| &c.solutions);
            let Some(first) = sets.next() else { return false };
            let mut common: Vec<u64> = first.clone();
            for s in sets {
                common.retain(|x| s.contains(x));
            }
            common.is_empty()
        });
        Self {
            chain: Some(ChainJson::from(chain)),
            signature_prefix: Some(sig.to_string()),
            constraints,
            disjoint_solutions: disjoint,
            note: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub total_ms: u128,
}
