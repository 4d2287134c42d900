//! Quasi-smoothness of general members of monomial linear systems.
//!
//! The combinatorial test used throughout is the coordinate-subset criterion:
//! for every nonempty set `I` of variables, either some monomial lives on
//! `I` alone, or at least `|I|` distinct variables `x_j` outside `I` occur
//! linearly in a monomial `(monomial on I) * x_j`. Verdicts from it are
//! reported as "combinatorial"; the finite-field search in [`falsifier`]
//! produces point witnesses instead.

mod falsifier;

pub use falsifier::{singular_point_search, ExplicitPolynomial, SearchOutcome, SearchStrategy};

use crate::ambient::{well_formed, Monomial, MonomialSystem, WeightedFamily};
use crate::arith::semigroup_contains;
use crate::error::{Error, Result};

pub const MAX_SUBSET_VARS: usize = 20;

/// Subset criterion over raw exponent vectors, restricted to the variables in `vars`.
///
/// Every exponent vector must have `num_vars` entries and be supported inside `vars`.
pub fn subset_criterion<'a, I>(num_vars: usize, vars: u32, monomials: I) -> Result<bool>
where
    I: IntoIterator<Item = &'a [u32]>,
{
    if num_vars > MAX_SUBSET_VARS {
        return Err(Error::TooManyVariables(num_vars));
    }
    let size = 1usize << num_vars;
    // pure[S]: a monomial with support exactly S; near[j][S]: a monomial x_j * (monomial on S)
    let mut pure = vec![false; size];
    let mut near = vec![vec![false; size]; num_vars];
    let mut any = false;
    for e in monomials {
        debug_assert_eq!(e.len(), num_vars);
        any = true;
        let mut support = 0u32;
        for (i, &x) in e.iter().enumerate() {
            if x > 0 {
                support |= 1 << i;
            }
        }
        debug_assert_eq!(support & !vars, 0, "monomial outside the variable set");
        pure[support as usize] = true;
        for (j, &x) in e.iter().enumerate() {
            if x == 1 {
                near[j][(support & !(1 << j)) as usize] = true;
            }
        }
    }
    if !any {
        return Err(Error::EmptySystem);
    }
    close_upwards(&mut pure, num_vars);
    for table in near.iter_mut() {
        close_upwards(table, num_vars);
    }

    let mut subset = vars;
    while subset != 0 {
        let s = subset as usize;
        if !pure[s] {
            let outside = vars & !subset;
            let linear = (0..num_vars)
                .filter(|&j| outside & (1 << j) != 0 && near[j][s])
                .count();
            if linear < subset.count_ones() as usize {
                return Ok(false);
            }
        }
        subset = (subset - 1) & vars;
    }
    Ok(true)
}

// After this, table[m] holds iff table[s] held for some s contained in m.
fn close_upwards(table: &mut [bool], num_vars: usize) {
    for b in 0..num_vars {
        let bit = 1usize << b;
        for m in 0..table.len() {
            if m & bit != 0 && table[m ^ bit] {
                table[m] = true;
            }
        }
    }
}

fn all_vars(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Whether some quasi-smooth hypersurface of degree `d` exists in `P(a)`.
///
/// Either `a_i = d` for some `i`, or every nonempty index set `I` has `d` in
/// the semigroup of `{a_i : i in I}` or at least `|I|` indices `j` outside `I`
/// with `d - a_j` in that semigroup.
pub fn exists_quasismooth(fam: &WeightedFamily) -> Result<bool> {
    if !well_formed(fam) {
        return Err(Error::NotWellFormed);
    }
    let n = fam.num_vars();
    if n > MAX_SUBSET_VARS {
        return Err(Error::TooManyVariables(n));
    }
    let d = fam.degree();
    if fam.weights().contains(&d) {
        return Ok(true);
    }
    let full = all_vars(n);
    let mut subset = full;
    while subset != 0 {
        let gens: Vec<u64> = (0..n)
            .filter(|&i| subset & (1 << i) != 0)
            .map(|i| fam.weight(i))
            .collect();
        if !semigroup_contains(&gens, d) {
            let count = (0..n)
                .filter(|&j| subset & (1 << j) == 0)
                .filter(|&j| {
                    let a = fam.weight(j);
                    a <= d && semigroup_contains(&gens, d - a)
                })
                .count();
            if count < subset.count_ones() as usize {
                return Ok(false);
            }
        }
        subset -= 1;
        subset &= full;
    }
    Ok(true)
}

/// Subset criterion for the general member of `system` over all its variables.
pub fn general_member_quasismooth(system: &MonomialSystem) -> Result<bool> {
    let n = system.family().num_vars();
    quasismooth_on_variables(system, all_vars(n))
}

/// Subset criterion restricted to the variables in `mask`.
///
/// Monomials of `system` with support outside `mask` are ignored; the
/// result is about the hypersurface cut out in the coordinate subspace
/// spanned by `mask`.
pub fn quasismooth_on_variables(system: &MonomialSystem, mask: u32) -> Result<bool> {
    let n = system.family().num_vars();
    let inside = system
        .monomials()
        .iter()
        .filter(|m| m.support() & !mask == 0)
        .map(|m| m.exponents());
    subset_criterion(n, mask, inside)
}

/// A monomial `x_i^k` or `x_i^k x_j` (`j != i`) of the system.
///
/// Pure powers are preferred, then the partner `x_j` with the smallest index.
pub fn required_monomial(system: &MonomialSystem, i: usize) -> Option<Monomial> {
    let mut best: Option<(usize, &Monomial)> = None;
    for m in system.monomials() {
        let e = m.exponents();
        if e[i] == 0 {
            continue;
        }
        let mut partner = None;
        let mut valid = true;
        for (j, &x) in e.iter().enumerate() {
            if j == i || x == 0 {
                continue;
            }
            if x != 1 || partner.is_some() {
                valid = false;
                break;
            }
            partner = Some(j);
        }
        if !valid {
            continue;
        }
        // rank 0 for the pure power, 1 + j for a partner x_j
        let rank = partner.map_or(0, |j| j + 1);
        if best.is_none_or(|(r, _)| rank < r) {
            best = Some((rank, m));
        }
    }
    best.map(|(_, m)| m.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{enumerate_monomials, DEFAULT_MONOMIAL_BUDGET};

    fn fam(w: &[u64], d: u64) -> WeightedFamily {
        WeightedFamily::new(w.to_vec(), d).unwrap()
    }

    fn system(f: &WeightedFamily, ms: &[&[u32]]) -> MonomialSystem {
        MonomialSystem::new(f.clone(), ms.iter().map(|e| Monomial(e.to_vec())).collect()).unwrap()
    }

    #[test]
    fn existence_examples() {
        assert!(exists_quasismooth(&fam(&[1, 1, 1, 2, 3], 6)).unwrap());
        assert!(exists_quasismooth(&fam(&[1, 1, 1, 2, 3], 3)).unwrap());
        assert!(exists_quasismooth(&fam(&[3, 7, 2, 4, 5], 37)).unwrap());
        assert_eq!(
            exists_quasismooth(&fam(&[1, 2, 2, 2], 4)),
            Err(Error::NotWellFormed)
        );
    }

    #[test]
    fn existence_failure() {
        // I = {1, 2} (weights 3, 4): 5 is not in <3, 4> and only x_0 pairs up
        assert!(!exists_quasismooth(&fam(&[1, 3, 4], 5)).unwrap());
        assert!(!exists_quasismooth(&fam(&[2, 3, 5], 7)).unwrap());
    }

    #[test]
    fn full_system_matches_existence() {
        let f = fam(&[1, 1, 1, 2, 3], 6);
        let all = enumerate_monomials(&f, DEFAULT_MONOMIAL_BUDGET).unwrap();
        assert!(general_member_quasismooth(&all).unwrap());
    }

    #[test]
    fn klein_cycle_passes() {
        let f = fam(&[1, 1, 1], 4);
        let s = system(&f, &[&[3, 1, 0], &[0, 3, 1], &[1, 0, 3]]);
        assert!(general_member_quasismooth(&s).unwrap());
    }

    #[test]
    fn lone_monomial_fails() {
        let m: [&[u32]; 1] = [&[2, 1]];
        assert!(!subset_criterion(2, 0b11, m).unwrap());
        let f = fam(&[1, 1, 1], 3);
        let s = system(&f, &[&[2, 1, 0]]);
        assert!(!general_member_quasismooth(&s).unwrap());
    }

    #[test]
    fn empty_system_is_an_error() {
        let f = fam(&[1, 1, 1], 3);
        let s = system(&f, &[]);
        assert_eq!(general_member_quasismooth(&s), Err(Error::EmptySystem));
    }

    #[test]
    fn required_monomial_examples() {
        let f = fam(&[3, 7, 2, 4, 5], 37);
        let all = enumerate_monomials(&f, DEFAULT_MONOMIAL_BUDGET).unwrap();
        assert_eq!(
            required_monomial(&all, 0),
            Some(Monomial(vec![10, 1, 0, 0, 0]))
        );

        let g = fam(&[1, 1, 2, 3], 6);
        let s = system(&g, &[&[6, 0, 0, 0], &[5, 1, 0, 0]]);
        assert_eq!(required_monomial(&s, 0), Some(Monomial(vec![6, 0, 0, 0])));

        let h = fam(&[1, 1, 1], 3);
        let s = system(&h, &[&[1, 1, 1]]);
        assert_eq!(required_monomial(&s, 0), None);
    }
}
