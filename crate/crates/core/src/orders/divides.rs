use super::{check_order_hypotheses, CycleChain, OrderVerdict, Provenance, Signature};
use crate::ambient::{is_linear_cone, well_formed, Monomial, MonomialSystem, WeightedFamily};
use crate::arith::{mul_mod, PrimePowerOrder};
use crate::error::{Error, Hypothesis, Result};
use super::signature_from_chain;

/// Decides prime order `p` when every weight divides `d`.
///
/// Certified exactly when (a) `p | d`, (b) `a_i p | d - a_j` for some
/// `i != j`, or (c) some weight value `w` occurring at least `l + 1 >= 2`
/// times has `(1 - d/w)^{l+1} = 1 (mod p)`. Otherwise refuted.
pub fn divides_d_criterion(fam: &WeightedFamily, p: u64) -> Result<OrderVerdict> {
    let order = PrimePowerOrder::prime(p).map_err(|_| Error::NotPrime(p))?;
    check_order_hypotheses(fam)?;
    if !fam.all_weights_divide_degree() {
        return Err(Error::HypothesisViolated(Hypothesis::WeightsDivideDegree));
    }
    if !well_formed(fam) {
        return Err(Error::HypothesisViolated(Hypothesis::WellFormed));
    }
    if is_linear_cone(fam) {
        return Err(Error::HypothesisViolated(Hypothesis::NotLinearCone));
    }
    let n = fam.num_vars();
    let d = fam.degree();
    let w = fam.weights();
    let fermat = |skip: &[usize]| -> Vec<Monomial> {
        (0..n)
            .filter(|k| !skip.contains(k))
            .map(|k| Monomial::pure_power(n, k, (d / w[k]) as u32))
            .collect()
    };
    let unit_vector = |i: usize| {
        let mut s = vec![0; n];
        s[i] = 1;
        Signature::new(p, s)
    };

    if d % p == 0 {
        let i = (0..n)
            .find(|&i| w[i] % p != 0)
            .expect("gcd of the weights is 1");
        let witness = MonomialSystem::new(fam.clone(), fermat(&[]))?;
        return Ok(OrderVerdict::certified(order, Provenance::DividesDCriterion, None, unit_vector(i), 0, witness)?
            .with_note(format!("case (a): p divides d; Fermat with sigma = e_{i}")));
    }

    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            if w[j] >= d || (d - w[j]) % (w[i] * p) != 0 {
                continue;
            }
            let m = ((d - w[j]) / w[i]) as u32;
            let mut monomials = fermat(&[i]);
            monomials.push(Monomial::near_power(n, i, m, j));
            let witness = MonomialSystem::new(fam.clone(), monomials)?;
            return Ok(OrderVerdict::certified(order, Provenance::DividesDCriterion, None, unit_vector(i), 0, witness)?
                .with_note(format!("case (b): a_{i} p divides d - a_{j}; x{i}^{m}*x{j} plus Fermat")));
        }
    }

    for (&weight, &mult) in &fam.multiplicities() {
        let base = (p + 1 - (d / weight) % p) % p;
        let mut power = base;
        for len in 2..=mult {
            power = mul_mod(power, base, p);
            if power != 1 % p {
                continue;
            }
            let class: Vec<usize> = (0..n).filter(|&k| w[k] == weight).take(len).collect();
            let chain = CycleChain::new(fam, class.clone(), vec![d / weight - 1; len])?;
            let mut monomials = chain.monomials(n);
            monomials.extend(fermat(&class));
            let witness = MonomialSystem::new(fam.clone(), monomials)?;
            let signature = signature_from_chain(fam, &chain, p).complete_with(0);
            return Ok(OrderVerdict::certified(
                order,
                Provenance::DividesDCriterion,
                Some(chain),
                signature,
                0,
                witness,
            )?
            .with_note(format!(
                "case (c): (1 - d/{weight})^{len} = 1 mod {p}; cycle on {class:?} plus Fermat"
            )));
        }
    }

    Ok(OrderVerdict::refuted(order, Provenance::DividesDCriterion)
        .with_note("none of the cases (a), (b), (c) applies"))
}
