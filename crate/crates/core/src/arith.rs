//! Small-integer number theory helpers: primality, factorization, sieving.
//!
//! Everything here works on machine words. The values involved (auxiliary
//! primes, conductors, candidate primes) are small; the arbitrary-precision
//! side of the toolkit lives in [`crate::eisenstein`] and [`crate::poly`].

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
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

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
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

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q) {
            let mut e = 0;
            while n.is_multiple_of(q) {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// All primes `<= bound` (sieve of Eratosthenes).
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Smallest primitive root modulo an odd prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = prime_divisors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("every prime has a primitive root")
}

/// Result of trial-dividing a big integer up to a bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialDivision {
    /// Prime factors found, with multiplicity.
    pub factors: Vec<(u64, u32)>,
    /// What is left after removing every prime `<= bound`. `1` when fully
    /// factored.
    pub cofactor: BigUint,
    /// True when the cofactor is 1 or provably prime (smaller than bound²).
    pub complete: bool,
}

impl TrialDivision {
    /// Every prime known to divide the input, including a cofactor that is
    /// certainly prime.
    pub fn primes(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self.factors.iter().map(|&(p, _)| p).collect();
        if self.complete && !self.cofactor.is_one() {
            if let Some(c) = self.cofactor.to_u64() {
                out.push(c);
            }
        }
        out
    }
}

/// Trial division of `|n|` by all primes up to `bound`. `n` must be nonzero.
pub fn trial_divide(n: &BigInt, bound: u64) -> TrialDivision {
    assert!(!n.is_zero(), "trial division of zero");
    let mut rest = n.abs().to_biguint().expect("absolute value");
    let mut factors = Vec::new();
    // every prime below `cleared` has been divided out of `rest`
    let mut cleared = bound.saturating_add(1);
    for q in primes_up_to(bound) {
        if rest.is_one() {
            break;
        }
        if rest.bits() <= 64 {
            let r = rest.to_u64().unwrap();
            if (r as u128) < (q as u128) * (q as u128) {
                cleared = q;
                break;
            }
        }
        if (&rest % q).is_zero() {
            let mut e = 0;
            while (&rest % q).is_zero() {
                rest /= q;
                e += 1;
            }
            factors.push((q, e));
        }
    }
    let complete = rest.is_one() || {
        let b = BigUint::from(cleared);
        rest < &b * &b
    };
    TrialDivision {
        factors,
        cofactor: rest,
        complete,
    }
}

/// `n mod m` as a machine word, for `m >= 1`.
pub fn bigint_mod(n: &BigInt, m: u64) -> u64 {
    n.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}
