//! Exact integer, modular and numerical-semigroup primitives.
//!
//! Everything here works on machine integers with `u128` intermediates,
//! except [`is_prime_big`] which accepts arbitrary-precision input.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A prime power `q = p^r` with `p` verified prime and `r >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PrimePowerOrder {
    p: u64,
    r: u32,
    q: u64,
}

impl PrimePowerOrder {
    pub fn new(p: u64, r: u32) -> Result<Self> {
        if r == 0 || !is_prime(p) {
            return Err(Error::NotAPrimePower(p));
        }
        let q = p
            .checked_pow(r)
            .ok_or_else(|| Error::InvalidFamily(format!("{p}^{r} overflows")))?;
        Ok(Self { p, r, q })
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn is_prime(&self) -> bool {
        self.r == 1
    }
}

impl fmt::Display for PrimePowerOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}", self.p, self.r)
        }
    }
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduces a signed integer into `[0, m)`.
pub fn reduce_signed(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

// Bases 2..=37 make Miller-Rabin deterministic below 3.3e24, covering u64.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &b in &MR_BASES {
        if n == b {
            return true;
        }
        if n % b == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic primality for big integers below 3317044064679887385961981.
///
/// Larger inputs are refused rather than tested probabilistically.
pub fn is_prime_big(n: &BigUint) -> Result<bool> {
    if let Some(small) = n.to_u64() {
        return Ok(is_prime(small));
    }
    let limit: BigUint = "3317044064679887385961981".parse().expect("literal");
    if *n >= limit {
        return Err(Error::PrimalityOutOfRange(n.to_string()));
    }
    let bases = [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    for &b in &bases {
        if (n % b).is_zero() {
            return Ok(false);
        }
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'witness: for &b in &bases {
        let mut x = BigUint::from(b).modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// Splits `q = p^r` with `p` prime.
pub fn prime_power_decompose(q: u64) -> Result<PrimePowerOrder> {
    if q < 2 {
        return Err(Error::NotAPrimePower(q));
    }
    let p = smallest_prime_factor(q);
    let mut rest = q;
    let mut r = 0u32;
    while rest % p == 0 {
        rest /= p;
        r += 1;
    }
    if rest != 1 {
        return Err(Error::NotAPrimePower(q));
    }
    PrimePowerOrder::new(p, r)
}

fn smallest_prime_factor(n: u64) -> u64 {
    if is_prime(n) {
        return n;
    }
    let mut f = 2u64;
    while f.saturating_mul(f) <= n {
        if n % f == 0 {
            return f;
        }
        f += if f == 2 { 1 } else { 2 };
    }
    n
}

pub fn gcd_all(xs: &[u64]) -> Result<u64> {
    let (first, rest) = xs.split_first().ok_or(Error::EmptyInput)?;
    Ok(rest.iter().fold(*first, |g, &x| g.gcd(&x)))
}

/// Whether `target` is a non-negative integer combination of `generators`.
///
/// Computes the Apéry set of the smallest usable generator with Dijkstra
/// over residues, so the table never exceeds `target + 1` entries.
pub fn semigroup_contains(generators: &[u64], target: u64) -> bool {
    if target == 0 {
        return true;
    }
    let usable: Vec<u64> = generators
        .iter()
        .copied()
        .filter(|&g| g >= 1 && g <= target)
        .collect();
    let Some(&modulus) = usable.iter().min() else {
        return false;
    };
    let m = modulus as usize;
    let mut dist = vec![u64::MAX; m];
    dist[0] = 0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, 0usize)));
    while let Some(Reverse((cost, residue))) = heap.pop() {
        if cost > dist[residue] {
            continue;
        }
        for &g in &usable {
            let next = (residue + (g % modulus) as usize) % m;
            let next_cost = cost + g;
            if next_cost < dist[next] {
                dist[next] = next_cost;
                heap.push(Reverse((next_cost, next)));
            }
        }
    }
    dist[(target % modulus) as usize] <= target
}

/// Ascending list of the positive divisors of `n`.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut k = 1u64;
    while k * k <= n {
        if n % k == 0 {
            small.push(k);
            if k != n / k {
                large.push(n / k);
            }
        }
        k += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Order of the diagonal action `sigma` in `(Z/q)^N / <a mod q>`.
///
/// This is the order of the induced automorphism of the weighted projective
/// space: the smallest `k >= 1` with `k sigma = c a (mod q)` for some `c`.
pub fn effective_order(sigma: &[u64], weights: &[u64], q: u64) -> u64 {
    assert_eq!(sigma.len(), weights.len(), "signature and weights differ in length");
    if q <= 1 {
        return 1;
    }
    for k in divisors(q) {
        if in_weight_subgroup(sigma, weights, k, q) {
            return k;
        }
    }
    q
}

fn in_weight_subgroup(sigma: &[u64], weights: &[u64], k: u64, q: u64) -> bool {
    let scaled: Vec<u64> = sigma.iter().map(|&s| mul_mod(s, k, q)).collect();
    (0..q).any(|c| {
        scaled
            .iter()
            .zip(weights)
            .all(|(&s, &a)| s == mul_mod(c, a % q, q))
    })
}

/// Inverse of `a` modulo `m`, when it exists.
pub fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = extended_gcd(a as i128 % m as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(reduce_signed(x, m))
}

fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = extended_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// All `x` in `[0, q)` with `k x = c (mod q)`, ascending.
pub fn solve_linear_congruence(k: u64, c: u64, q: u64) -> Vec<u64> {
    let k = k % q;
    let c = c % q;
    let g = k.gcd(&q);
    if c % g != 0 {
        return Vec::new();
    }
    let step = q / g;
    let x0 = if step == 1 {
        0
    } else {
        let inv = inverse_mod((k / g) % step, step).expect("k/g is a unit mod q/g");
        mul_mod((c / g) % step, inv, step)
    };
    (0..g).map(|t| x0 + t * step).collect()
}

/// Every prime power `p^r <= max`, sorted by value.
pub fn prime_powers_up_to(max: u64) -> Vec<PrimePowerOrder> {
    let mut out = Vec::new();
    if max < 2 {
        return out;
    }
    let limit = max as usize;
    let mut sieve = vec![true; limit + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2usize;
    while i * i <= limit {
        if sieve[i] {
            let mut j = i * i;
            while j <= limit {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    for (p, &prime) in sieve.iter().enumerate() {
        if !prime {
            continue;
        }
        let p = p as u64;
        let mut r = 1u32;
        let mut q = p;
        loop {
            out.push(PrimePowerOrder { p, r, q });
            match q.checked_mul(p) {
                Some(next) if next <= max => {
                    q = next;
                    r += 1;
                }
                _ => break,
            }
        }
    }
    out.sort_by_key(|o| o.q);
    out
}
